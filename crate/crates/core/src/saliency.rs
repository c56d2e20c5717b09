//! Per-pixel error and saliency maps: ground-truth residuals, the gradient and
//! entropy baselines, and binarization against a mean threshold.
//!
//! The "interest" baseline is the ROI probability map itself, converted with
//! `ErrorMap::from`.

use std::path::Path;

use num_traits::Float;

use crate::codec::read_emap;
use crate::error::{Error, Result};
use crate::raster::{check_same_dims, Bitmap, ErrorMap, Image, ProbabilityMap, Raster};
use crate::scalar::Scalar;

/// Binarization threshold `ε` in error-map units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold<T>(T);

impl<T: Scalar> Threshold<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be finite and non-negative, got {epsilon}"
            )));
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(self) -> T {
        self.0
    }
}

/// Absolute per-pixel difference `|a − b|`, symmetric in its arguments.
pub fn residual_error<R: Raster>(a: &R, b: &R) -> Result<ErrorMap<R::Value>> {
    check_same_dims(a.dims(), b.dims())?;
    let data = a.values().iter().zip(b.values()).map(|(&x, &y)| (x - y).abs()).collect();
    ErrorMap::new(a.width(), a.height(), data)
}

/// Sobel gradient magnitude with clamp-to-edge borders.
pub fn gradient_saliency<T: Scalar>(img: &Image<T>) -> Result<ErrorMap<T>> {
    let (w, h) = img.dims();
    if w < 3 || h < 3 {
        return Err(Error::InvalidParameter(format!(
            "gradient needs at least 3x3 pixels, image is {w}x{h}"
        )));
    }
    let px = |r: isize, c: isize| {
        let r = r.clamp(0, h as isize - 1) as usize;
        let c = c.clamp(0, w as isize - 1) as usize;
        img.get(r, c)
    };
    let two = T::lit(2.0);
    let mut data = Vec::with_capacity(w * h);
    for r in 0..h as isize {
        for c in 0..w as isize {
            let gx = (px(r - 1, c + 1) + two * px(r, c + 1) + px(r + 1, c + 1))
                - (px(r - 1, c - 1) + two * px(r, c - 1) + px(r + 1, c - 1));
            let gy = (px(r + 1, c - 1) + two * px(r + 1, c) + px(r + 1, c + 1))
                - (px(r - 1, c - 1) + two * px(r - 1, c) + px(r - 1, c + 1));
            data.push(gx.hypot(gy));
        }
    }
    ErrorMap::new(w, h, data)
}

fn binary_entropy<T: Scalar>(p: T) -> T {
    let term = |q: T| if q > T::zero() { -q * q.log2() } else { T::zero() };
    term(p) + term(T::one() - p)
}

/// Base-2 binary entropy of each probability; 1.0 at `p = 0.5`, 0 at `p ∈ {0, 1}`.
pub fn entropy_saliency<T: Scalar>(p: &ProbabilityMap<T>) -> Result<ErrorMap<T>> {
    let data = p.values().iter().map(|&v| binary_entropy(v)).collect();
    ErrorMap::new(p.width(), p.height(), data)
}

/// Per-image threshold: the arithmetic mean of all error values.
pub fn mean_threshold<T: Scalar>(e: &ErrorMap<T>) -> Result<Threshold<T>> {
    if e.is_empty() {
        return Err(Error::InvalidParameter("mean of an empty error map".into()));
    }
    let sum: T = e.values().iter().copied().sum();
    Threshold::new(sum / T::from_usize(e.len()).expect("pixel count"))
}

/// Sets a bit wherever the error strictly exceeds `ε`.
pub fn binarize<T: Scalar>(e: &ErrorMap<T>, t: Threshold<T>) -> Bitmap {
    let bits = e.values().iter().map(|&v| v > t.epsilon()).collect();
    Bitmap::new(e.width(), e.height(), bits).expect("same dimensions")
}

/// Reads an externally estimated error map (EMAP) whose values must lie in `[0, 1]`.
pub fn load_estimated_error<T: Scalar>(path: impl AsRef<Path>) -> Result<ErrorMap<T>> {
    let path = path.as_ref();
    let e = read_emap::<T>(path)?;
    if let Some((i, v)) = e.values().iter().enumerate().find(|(_, &v)| v > T::one()) {
        return Err(Error::InvalidRaster(format!(
            "{}: estimated error {v} at pixel {i} outside [0, 1]",
            path.display()
        )));
    }
    Ok(e)
}
