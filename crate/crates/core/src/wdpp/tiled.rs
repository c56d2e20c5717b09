//! Full-image WDPP rescan bitmaps built from independently sampled square tiles.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernel::{build_kernel, eigendecompose, EigenBasis};
use super::sample::kdpp_sample;
use crate::error::{Error, Result};
use crate::raster::{check_same_dims, Bitmap, ErrorMap, Raster};
use crate::scalar::Scalar;

/// Added to every saliency value before exponentiation.
pub const SALIENCY_FLOOR: f64 = 1e-6;
pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_SIGMA_S: f64 = 2.0;
pub const DEFAULT_TILE: usize = 32;

/// How many pixels to draw, the tile side used to bound kernel size, and the RNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleBudget {
    pub k: usize,
    pub tile: usize,
    pub seed: u64,
}

impl SampleBudget {
    pub fn new(k: usize, tile: usize, seed: u64) -> Result<Self> {
        if tile == 0 {
            return Err(Error::InvalidParameter("tile side must be >= 1".into()));
        }
        Ok(Self { k, tile, seed })
    }
}

/// Independent RNG for one tile; the same tile gets the same stream on any thread.
pub fn tile_rng(seed: u64, tile_row: usize, tile_col: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((tile_row as u64) << 32) | tile_col as u64);
    rng
}

#[derive(Debug, Clone)]
struct TilePlan<T> {
    tile_row: usize,
    tile_col: usize,
    /// Global row-major indices of the eligible pixels in this tile.
    items: Vec<usize>,
    /// Raw saliency mass `Σ u` over `items`.
    mass: f64,
    /// Floored, tile-normalized saliency in `items` order.
    saliency: Vec<T>,
    basis: Option<EigenBasis<T>>,
}

/// Precomputed per-tile kernels for one saliency map; draws are cheap afterwards.
#[derive(Debug, Clone)]
pub struct TiledWdpp<T> {
    width: usize,
    height: usize,
    tiles: Vec<TilePlan<T>>,
}

impl<T: Scalar> TiledWdpp<T> {
    /// Plans sampling over the pixels set in `eligible` (all pixels when `None`).
    pub fn new(u: &ErrorMap<T>, eligible: Option<&Bitmap>, tile: usize, gamma: T, sigma_s: T) -> Result<Self> {
        if tile == 0 {
            return Err(Error::InvalidParameter("tile side must be >= 1".into()));
        }
        if let Some(mask) = eligible {
            check_same_dims(u.dims(), mask.dims())?;
        }
        let (w, h) = u.dims();
        let floor = T::lit(SALIENCY_FLOOR);
        let mut jobs = Vec::new();
        for tr in 0..h.div_ceil(tile) {
            for tc in 0..w.div_ceil(tile) {
                jobs.push((tr, tc));
            }
        }
        let tiles = jobs
            .into_par_iter()
            .map(|(tr, tc)| {
                let mut items = Vec::new();
                for r in tr * tile..((tr + 1) * tile).min(h) {
                    for c in tc * tile..((tc + 1) * tile).min(w) {
                        let i = r * w + c;
                        if eligible.is_none_or(|m| m.bits()[i]) {
                            items.push(i);
                        }
                    }
                }
                let raw: Vec<T> = items.iter().map(|&i| u.values()[i]).collect();
                let mass: f64 = raw.iter().map(|v| v.as_f64()).sum();
                let peak = raw.iter().fold(T::zero(), |m, &v| m.max(v)) + floor;
                // k-DPP draws are invariant to scaling L, so normalize to keep the
                // spectrum clear of the eigenvalue clamp.
                let saliency: Vec<T> = raw.iter().map(|&v| (v + floor) / peak).collect();
                let basis = if mass > 0.0 {
                    let coords: Vec<(T, T)> = items
                        .iter()
                        .map(|&i| (T::from_usize(i % w).unwrap(), T::from_usize(i / w).unwrap()))
                        .collect();
                    let kernel = build_kernel(&saliency, &coords, gamma, sigma_s)?;
                    Some(eigendecompose(&kernel)?)
                } else {
                    None
                };
                Ok(TilePlan {
                    tile_row: tr,
                    tile_col: tc,
                    items,
                    mass,
                    saliency,
                    basis,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            width: w,
            height: h,
            tiles,
        })
    }

    pub fn eligible_count(&self) -> usize {
        self.tiles.iter().map(|t| t.items.len()).sum()
    }

    /// Per-tile sample counts for a total of `k`, in tile row-major order.
    pub fn budgets(&self, k: usize) -> Result<Vec<usize>> {
        let masses: Vec<f64> = self.tiles.iter().map(|t| t.mass).collect();
        let caps: Vec<usize> = self.tiles.iter().map(|t| t.items.len()).collect();
        apportion(&masses, &caps, k)
    }

    /// Draws a bitmap with exactly `k` set pixels, all of them eligible.
    pub fn sample(&self, k: usize, seed: u64) -> Result<Bitmap> {
        let budgets = self.budgets(k)?;
        let picks = self
            .tiles
            .par_iter()
            .zip(budgets)
            .map(|(tile, kt)| tile.draw(kt, seed))
            .collect::<Result<Vec<_>>>()?;
        Bitmap::from_indices(self.width, self.height, picks.into_iter().flatten())
    }
}

impl<T: Scalar> TilePlan<T> {
    fn draw(&self, k: usize, seed: u64) -> Result<Vec<usize>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut rng = tile_rng(seed, self.tile_row, self.tile_col);
        let Some(basis) = &self.basis else {
            // zero-saliency tile that received overflow budget
            return Ok(index::sample(&mut rng, self.items.len(), k)
                .into_iter()
                .map(|i| self.items[i])
                .collect());
        };
        let from_dpp = k.min(basis.rank());
        let mut local = kdpp_sample(basis, from_dpp, &mut rng)?;
        if from_dpp < k {
            // numerically rank-deficient kernel: top up with the most salient leftovers
            let mut taken = vec![false; self.items.len()];
            for &i in &local {
                taken[i] = true;
            }
            let mut rest: Vec<usize> = (0..self.items.len()).filter(|&i| !taken[i]).collect();
            rest.sort_by(|&a, &b| {
                self.saliency[b]
                    .partial_cmp(&self.saliency[a])
                    .expect("finite saliency")
                    .then(a.cmp(&b))
            });
            local.extend(rest.into_iter().take(k - from_dpp));
        }
        Ok(local.into_iter().map(|i| self.items[i]).collect())
    }
}

/// Splits `k` across bins in proportion to `masses` by largest remainder.
///
/// Bins are capped at `caps`; overflow is re-split among unsaturated bins with
/// positive mass, and only when none remain among zero-mass bins in proportion
/// to their free capacity. Ties in remainders go to the lower bin index.
pub fn apportion(masses: &[f64], caps: &[usize], k: usize) -> Result<Vec<usize>> {
    assert_eq!(masses.len(), caps.len());
    let capacity: usize = caps.iter().sum();
    if k > capacity {
        return Err(Error::InvalidParameter(format!(
            "budget {k} exceeds the {capacity} eligible pixels"
        )));
    }
    let mut alloc = vec![0usize; caps.len()];
    let mut remaining = k;
    while remaining > 0 {
        let open = |i: &usize| alloc[*i] < caps[*i];
        let mut bins: Vec<(usize, f64)> = (0..caps.len())
            .filter(open)
            .filter(|&i| masses[i] > 0.0)
            .map(|i| (i, masses[i]))
            .collect();
        if bins.is_empty() {
            bins = (0..caps.len())
                .filter(open)
                .map(|i| (i, (caps[i] - alloc[i]) as f64))
                .collect();
        }
        let total: f64 = bins.iter().map(|b| b.1).sum();
        let mut shares: Vec<(usize, usize, f64)> = bins
            .iter()
            .map(|&(i, m)| {
                let exact = remaining as f64 * m / total;
                let base = exact.floor();
                (i, base as usize, exact - base)
            })
            .collect();
        let mut given: usize = shares.iter().map(|s| s.1).sum();
        if given > remaining {
            // floating point overshoot; trim from the largest shares
            shares.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            for s in shares.iter_mut() {
                if given == remaining {
                    break;
                }
                if s.1 > 0 {
                    s.1 -= 1;
                    given -= 1;
                }
            }
        }
        let mut order: Vec<usize> = (0..shares.len()).collect();
        order.sort_by(|&a, &b| {
            shares[b]
                .2
                .partial_cmp(&shares[a].2)
                .expect("finite remainders")
                .then(shares[a].0.cmp(&shares[b].0))
        });
        for &o in order.iter().cycle().take(remaining - given) {
            shares[o].1 += 1;
        }
        let mut overflow = 0;
        for (i, share, _) in shares {
            let give = share.min(caps[i] - alloc[i]);
            alloc[i] += give;
            overflow += share - give;
        }
        remaining = overflow;
    }
    Ok(alloc)
}

/// Tiled WDPP rescan bitmap over every pixel of `u`.
///
/// Each `budget.tile`-sided tile gets a share of `budget.k` proportional to its
/// saliency mass and is sampled with an exact k-DPP on its own kernel.
pub fn tiled_wdpp_bitmap<T: Scalar>(u: &ErrorMap<T>, budget: &SampleBudget, gamma: T, sigma_s: T) -> Result<Bitmap> {
    if budget.k > u.len() {
        return Err(Error::InvalidParameter(format!(
            "budget {} exceeds pixel count {}",
            budget.k,
            u.len()
        )));
    }
    TiledWdpp::new(u, None, budget.tile, gamma, sigma_s)?.sample(budget.k, budget.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apportion_proportional_with_remainders() {
        assert_eq!(apportion(&[1.0, 1.0, 1.0, 1.0], &[10; 4], 8).unwrap(), vec![2; 4]);
        // exact shares 10/3 each: the extra unit goes to the lowest index
        assert_eq!(apportion(&[1.0, 1.0, 1.0], &[10; 3], 10).unwrap(), vec![4, 3, 3]);
        assert_eq!(apportion(&[3.0, 1.0], &[10; 2], 6).unwrap(), vec![5, 1]);
    }

    #[test]
    fn apportion_redistributes_overflow() {
        assert_eq!(apportion(&[10.0, 1.0, 0.0], &[3, 10, 10], 8).unwrap(), vec![3, 5, 0]);
        // all mass saturated: spill into zero-mass bins by free capacity
        assert_eq!(apportion(&[1.0, 0.0, 0.0], &[4, 4, 2], 7).unwrap(), vec![4, 2, 1]);
        assert!(apportion(&[1.0], &[3], 4).is_err());
    }

    #[test]
    fn empty_budget_is_empty_bitmap() {
        let u = ErrorMap::new(4, 4, vec![0.5f64; 16]).unwrap();
        let b = tiled_wdpp_bitmap(&u, &SampleBudget::new(0, 2, 1).unwrap(), 2.0, 2.0).unwrap();
        assert_eq!(b.popcount(), 0);
    }

    #[test]
    fn rejects_oversized_budget() {
        let u = ErrorMap::new(2, 2, vec![0.5f64; 4]).unwrap();
        assert!(tiled_wdpp_bitmap(&u, &SampleBudget::new(5, 2, 1).unwrap(), 2.0, 2.0).is_err());
        assert!(SampleBudget::new(1, 0, 1).is_err());
    }

    #[test]
    fn masked_sampling_stays_eligible() {
        let u = ErrorMap::new(8, 8, (0..64).map(|i| (i % 7) as f64 / 7.0).collect()).unwrap();
        let lattice = Bitmap::lattice(8, 8, 2).unwrap();
        let eligible = lattice.complement();
        let plan = TiledWdpp::new(&u, Some(&eligible), 4, 2.0, 2.0).unwrap();
        assert_eq!(plan.eligible_count(), 48);
        for seed in 0..20 {
            let b = plan.sample(30, seed).unwrap();
            assert_eq!(b.popcount(), 30);
            assert!(!b.intersects(&lattice));
        }
    }

    #[test]
    fn rank_deficient_tiles_are_topped_up() {
        // huge sigma makes every kernel numerically rank one
        let u = ErrorMap::new(4, 4, (0..16).map(|i| i as f64 / 16.0).collect()).unwrap();
        let b = tiled_wdpp_bitmap(&u, &SampleBudget::new(10, 4, 3).unwrap(), 1.0f64, 1e6).unwrap();
        assert_eq!(b.popcount(), 10);
    }

    #[test]
    fn works_in_single_precision() {
        let u = ErrorMap::new(6, 6, (0..36).map(|i| (i % 5) as f32 / 5.0).collect()).unwrap();
        let b = tiled_wdpp_bitmap(&u, &SampleBudget::new(7, 3, 9).unwrap(), 2.0f32, 2.0).unwrap();
        assert_eq!(b.popcount(), 7);
    }
}
