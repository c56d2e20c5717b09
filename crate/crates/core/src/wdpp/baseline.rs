//! Non-DPP rescan selections: greedy top-k and uniform random.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::raster::{check_same_dims, Bitmap, ErrorMap, Raster};
use crate::scalar::Scalar;

fn candidates(len: usize, eligible: Option<&Bitmap>) -> Vec<usize> {
    match eligible {
        Some(m) => m.ones_indices().collect(),
        None => (0..len).collect(),
    }
}

fn check_budget(k: usize, available: usize) -> Result<()> {
    if k > available {
        return Err(Error::InvalidParameter(format!(
            "budget {k} exceeds the {available} eligible pixels"
        )));
    }
    Ok(())
}

/// Sets the `k` highest-saliency pixels; ties go to the smaller row-major index.
pub fn topk_bitmap<T: Scalar>(u: &ErrorMap<T>, k: usize) -> Result<Bitmap> {
    topk_bitmap_among(u, None, k)
}

pub fn topk_bitmap_among<T: Scalar>(u: &ErrorMap<T>, eligible: Option<&Bitmap>, k: usize) -> Result<Bitmap> {
    if let Some(m) = eligible {
        check_same_dims(u.dims(), m.dims())?;
    }
    let mut idx = candidates(u.len(), eligible);
    check_budget(k, idx.len())?;
    let v = u.values();
    // stable sort keeps row-major order within ties
    idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).expect("finite error map"));
    Bitmap::from_indices(u.width(), u.height(), idx.into_iter().take(k))
}

/// Uniformly random `k`-subset of pixels, deterministic in `seed`.
pub fn random_bitmap(width: usize, height: usize, k: usize, seed: u64) -> Result<Bitmap> {
    random_bitmap_among(&Bitmap::ones(width, height), k, seed)
}

pub fn random_bitmap_among(eligible: &Bitmap, k: usize, seed: u64) -> Result<Bitmap> {
    let mut idx = candidates(eligible.len(), Some(eligible));
    check_budget(k, idx.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = idx.partial_shuffle(&mut rng, k);
    Bitmap::from_indices(eligible.width(), eligible.height(), chosen.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topk_full_budget_sets_everything() {
        let u = ErrorMap::new(3, 2, vec![0.1, 0.5, 0.2, 0.9, 0.0, 0.3]).unwrap();
        assert_eq!(topk_bitmap(&u, 6).unwrap(), Bitmap::ones(3, 2));
    }

    #[test]
    fn topk_picks_largest_values() {
        let u = ErrorMap::new(3, 2, vec![0.1, 0.5, 0.2, 0.9, 0.0, 0.3]).unwrap();
        let b = topk_bitmap(&u, 3).unwrap();
        assert_eq!(b.ones_indices().collect::<Vec<_>>(), vec![1, 3, 5]);
    }

    #[test]
    fn topk_ties_are_row_major() {
        let u = ErrorMap::new(4, 2, vec![0.5f32; 8]).unwrap();
        let b = topk_bitmap(&u, 3).unwrap();
        assert_eq!(b.ones_indices().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn topk_respects_eligibility() {
        let u = ErrorMap::new(2, 2, vec![0.9, 0.8, 0.1, 0.2]).unwrap();
        let mut m = Bitmap::ones(2, 2);
        m.set(0, 0, false);
        let b = topk_bitmap_among(&u, Some(&m), 2).unwrap();
        assert_eq!(b.ones_indices().collect::<Vec<_>>(), vec![1, 3]);
        assert!(topk_bitmap_among(&u, Some(&m), 4).is_err());
    }

    #[test]
    fn random_is_deterministic_and_exact() {
        for k in [0, 1, 17, 64] {
            let a = random_bitmap(8, 8, k, 42).unwrap();
            assert_eq!(a.popcount(), k);
            assert_eq!(a, random_bitmap(8, 8, k, 42).unwrap());
        }
        assert!(random_bitmap(2, 2, 5, 0).is_err());
    }
}
