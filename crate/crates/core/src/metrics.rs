//! Image quality and error-estimation measures.

use num_traits::{Float, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{check_same_dims, ErrorMap, Raster};
use crate::scalar::Scalar;

/// Mean absolute difference.
pub fn l1_loss<R: Raster>(a: &R, b: &R) -> Result<R::Value> {
    check_same_dims(a.dims(), b.dims())?;
    let sum: R::Value = a.values().iter().zip(b.values()).map(|(&x, &y)| (x - y).abs()).sum();
    Ok(sum / count::<R::Value>(a.len()))
}

pub fn mse<R: Raster>(a: &R, b: &R) -> Result<R::Value> {
    check_same_dims(a.dims(), b.dims())?;
    let sum: R::Value = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    Ok(sum / count::<R::Value>(a.len()))
}

fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n.max(1)).expect("pixel count")
}

/// Peak signal-to-noise ratio in dB for unit dynamic range; `+∞` for identical inputs.
pub fn psnr<R: Raster>(a: &R, b: &R) -> Result<R::Value> {
    let m = mse(a, b)?;
    if m == R::Value::zero() {
        return Ok(R::Value::infinity());
    }
    Ok(R::Value::lit(10.0) * m.recip().log10())
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn gaussian_window<T: Scalar>() -> Vec<T> {
    let half = (SSIM_WINDOW / 2) as f64;
    let raw: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| T::lit(v / total)).collect()
}

/// Separable "valid" filtering with the SSIM window; output is `(w−10) × (h−10)`.
fn filter_valid<T: Scalar>(data: &[T], w: usize, h: usize, win: &[T]) -> Vec<T> {
    let n = win.len();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut horiz = vec![T::zero(); h * ow];
    horiz.par_chunks_mut(ow).enumerate().for_each(|(r, out)| {
        let row = &data[r * w..(r + 1) * w];
        for (c, o) in out.iter_mut().enumerate() {
            *o = win.iter().zip(&row[c..c + n]).fold(T::zero(), |acc, (&k, &x)| acc + k * x);
        }
    });
    let mut out = vec![T::zero(); oh * ow];
    out.par_chunks_mut(ow).enumerate().for_each(|(r, dst)| {
        for (c, o) in dst.iter_mut().enumerate() {
            *o = win
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, &wk)| acc + wk * horiz[(r + k) * ow + c]);
        }
    });
    out
}

/// Mean structural similarity over all fully contained 11×11 Gaussian windows
/// (σ = 1.5, K1 = 0.01, K2 = 0.03, unit dynamic range).
pub fn ssim<R: Raster>(a: &R, b: &R) -> Result<R::Value> {
    check_same_dims(a.dims(), b.dims())?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let win = gaussian_window::<R::Value>();
    let (x, y) = (a.values(), b.values());
    let xx: Vec<_> = x.iter().map(|&v| v * v).collect();
    let yy: Vec<_> = y.iter().map(|&v| v * v).collect();
    let xy: Vec<_> = x.iter().zip(y).map(|(&p, &q)| p * q).collect();
    let mu_x = filter_valid(x, w, h, &win);
    let mu_y = filter_valid(y, w, h, &win);
    let s_xx = filter_valid(&xx, w, h, &win);
    let s_yy = filter_valid(&yy, w, h, &win);
    let s_xy = filter_valid(&xy, w, h, &win);

    let c1 = R::Value::lit(SSIM_K1 * SSIM_K1);
    let c2 = R::Value::lit(SSIM_K2 * SSIM_K2);
    let two = R::Value::lit(2.0);
    let mut total = R::Value::zero();
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = s_xx[i] - mx * mx;
        let vy = s_yy[i] - my * my;
        let cov = s_xy[i] - mx * my;
        let num = (two * mx * my + c1) * (two * cov + c2);
        let den = (mx * mx + my * my + c1) * (vx + vy + c2);
        total = total + num / den;
    }
    Ok(total / count::<R::Value>(mu_x.len()))
}

/// Sample Pearson correlation over all pixels.
pub fn pearson<R: Raster>(a: &R, b: &R) -> Result<R::Value> {
    check_same_dims(a.dims(), b.dims())?;
    pearson_slices(a.values(), b.values())
}

pub fn pearson_slices<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "correlation of {} vs {} values",
            x.len(),
            y.len()
        )));
    }
    let n = count::<T>(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&p, &q) in x.iter().zip(y) {
        let (dp, dq) = (p - mx, q - my);
        sxy = sxy + dp * dq;
        sxx = sxx + dp * dp;
        syy = syy + dq * dq;
    }
    if sxx == T::zero() {
        return Err(Error::ZeroVariance("first input"));
    }
    if syy == T::zero() {
        return Err(Error::ZeroVariance("second input"));
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

/// Residual-error decay as the highest-ranked pixels are corrected.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsificationCurve<T> {
    pub fractions: Vec<T>,
    pub residuals: Vec<T>,
}

/// Default grid: 0 to 0.10 in steps of 0.01, then to 1.0 in steps of 0.05.
pub fn default_fractions<T: Scalar>() -> Vec<T> {
    (0..=10)
        .map(|i| i as f64 / 100.0)
        .chain((3..=20).map(|i| i as f64 * 5.0 / 100.0))
        .map(T::lit)
        .collect()
}

/// Row-major pixel order by descending estimate, ties to the lower index.
pub fn rank_descending<T: Scalar>(estimated: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..estimated.len()).collect();
    order.sort_by(|&a, &b| estimated[b].partial_cmp(&estimated[a]).expect("finite estimate"));
    order
}

/// For each fraction `f`, zeroes the ground-truth error at the `⌊f·N⌋` pixels the
/// estimator ranks highest and records the mean error that remains.
pub fn sparsification_curve<T: Scalar>(
    estimated: &ErrorMap<T>,
    truth: &ErrorMap<T>,
    fractions: &[T],
) -> Result<SparsificationCurve<T>> {
    check_same_dims(estimated.dims(), truth.dims())?;
    check_fractions(fractions)?;
    let order = rank_descending(estimated.values());
    Ok(curve_from_order(&order, truth.values(), fractions))
}

pub(crate) fn check_fractions<T: Scalar>(fractions: &[T]) -> Result<()> {
    for w in fractions.windows(2) {
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidParameter("fractions must be strictly ascending".into()));
        }
    }
    if fractions.iter().any(|&f| !(f >= T::zero() && f <= T::one())) {
        return Err(Error::InvalidParameter("fractions must lie in [0, 1]".into()));
    }
    Ok(())
}

/// Curve for an explicit correction order (used for random orderings as well).
pub fn curve_from_order<T: Scalar>(order: &[usize], truth: &[T], fractions: &[T]) -> SparsificationCurve<T> {
    let n = truth.len();
    // suffix[j] = Σ truth over order[j..]
    let mut suffix = vec![T::zero(); n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + truth[order[j]];
    }
    let denom = count::<T>(n);
    let residuals = fractions
        .iter()
        .map(|&f| {
            let k = ((f.as_f64() * n as f64).floor() as usize).min(n);
            suffix[k] / denom
        })
        .collect();
    SparsificationCurve {
        fractions: fractions.to_vec(),
        residuals,
    }
}
