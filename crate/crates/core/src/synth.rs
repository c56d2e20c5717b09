//! Deterministic EM-like phantoms: bright cell bodies separated by thin dark
//! membranes, with dark vesicles and sensor noise. Used as stand-in specimens
//! when no real high-resolution tiles are at hand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::raster::Image;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhantomParams {
    /// Mean cell diameter in pixels.
    pub cell_size: f64,
    /// Membrane half-thickness in pixels.
    pub membrane: f64,
    /// Vesicles per cell on average.
    pub vesicles: f64,
    /// Standard deviation of additive Gaussian noise.
    pub noise: f64,
}

impl Default for PhantomParams {
    fn default() -> Self {
        Self {
            cell_size: 14.0,
            membrane: 1.2,
            vesicles: 1.5,
            noise: 0.03,
        }
    }
}

pub fn em_phantom<T: Scalar>(width: usize, height: usize, seed: u64, params: &PhantomParams) -> Result<Image<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let area = (width * height) as f64;
    let cells = ((area / (params.cell_size * params.cell_size)).ceil() as usize).max(2);
    let seeds: Vec<(f64, f64, f64)> = (0..cells)
        .map(|_| {
            (
                rng.random_range(0.0..width as f64),
                rng.random_range(0.0..height as f64),
                rng.random_range(0.55..0.85),
            )
        })
        .collect();
    let vesicle_count = (cells as f64 * params.vesicles).round() as usize;
    let vesicles: Vec<(f64, f64, f64)> = (0..vesicle_count)
        .map(|_| {
            (
                rng.random_range(0.0..width as f64),
                rng.random_range(0.0..height as f64),
                rng.random_range(1.0..2.5),
            )
        })
        .collect();
    let noise = Normal::new(0.0, params.noise.max(0.0)).expect("finite noise level");

    let mut data = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let (x, y) = (c as f64 + 0.5, r as f64 + 0.5);
            let (mut d1, mut d2, mut tone) = (f64::INFINITY, f64::INFINITY, 0.0);
            for &(sx, sy, t) in &seeds {
                let d = ((x - sx).powi(2) + (y - sy).powi(2)).sqrt();
                if d < d1 {
                    d2 = d1;
                    d1 = d;
                    tone = t;
                } else if d < d2 {
                    d2 = d;
                }
            }
            // distance to the bisector between the two nearest seeds
            let edge = (d2 - d1) * 0.5;
            let membrane = (-(edge / params.membrane).powi(2)).exp();
            let mut v = tone * (1.0 - membrane) + 0.12 * membrane;
            for &(vx, vy, rad) in &vesicles {
                let d = ((x - vx).powi(2) + (y - vy).powi(2)).sqrt();
                if d < rad + 1.0 {
                    let rim = (-((d - rad) / 0.6).powi(2)).exp();
                    v = v.min(1.0 - 0.6 * rim);
                }
            }
            v += noise.sample(&mut rng);
            data.push(T::lit(v));
        }
    }
    Image::from_clamped(width, height, data)
}
