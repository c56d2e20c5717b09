//! Interpolating reconstruction of the low-resolution scan and compositing of
//! rescanned pixels into the final output.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{check_same_dims, downsample_nearest, Bitmap, Image, Raster};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interpolation {
    Nearest,
    Bilinear,
    /// Catmull-Rom cubic convolution (`a = -0.5`), clamp-to-edge.
    Bicubic,
}

impl FromStr for Interpolation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "bilinear" => Ok(Self::Bilinear),
            "bicubic" => Ok(Self::Bicubic),
            other => Err(Error::InvalidParameter(format!("unknown interpolation {other:?}"))),
        }
    }
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nearest => "nearest",
            Self::Bilinear => "bilinear",
            Self::Bicubic => "bicubic",
        })
    }
}

const CATMULL_ROM_A: f64 = -0.5;

fn cubic_weight(x: f64) -> f64 {
    let a = CATMULL_ROM_A;
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    } else {
        0.0
    }
}

/// Source taps and weights for one output coordinate along one axis.
type Taps<T> = Vec<(usize, T)>;

fn axis_taps<T: Scalar>(out_len: usize, in_len: usize, rate: usize, method: Interpolation) -> Vec<Taps<T>> {
    let last = in_len as isize - 1;
    let clamp = |i: isize| i.clamp(0, last) as usize;
    (0..out_len)
        .map(|o| {
            let base = (o / rate) as isize;
            let frac = (o % rate) as f64 / rate as f64;
            match method {
                Interpolation::Nearest => vec![(clamp(base), T::one())],
                Interpolation::Bilinear => {
                    vec![(clamp(base), T::lit(1.0 - frac)), (clamp(base + 1), T::lit(frac))]
                }
                Interpolation::Bicubic => (-1..=2)
                    .map(|k| (clamp(base + k), T::lit(cubic_weight(frac - k as f64))))
                    .collect(),
            }
        })
        .collect()
}

/// Upsamples by an integer `rate`. Output pixel `(i, j)` interpolates the input at
/// `(i / rate, j / rate)`, so decimation lattice positions reproduce the input exactly.
pub fn upsample<T: Scalar>(img: &Image<T>, rate: usize, method: Interpolation) -> Result<Image<T>> {
    if rate == 0 {
        return Err(Error::InvalidParameter("upsampling rate must be >= 1".into()));
    }
    let (w, h) = img.dims();
    let (ow, oh) = (w * rate, h * rate);
    if w == 0 || h == 0 {
        return Image::new(ow, oh, Vec::new());
    }
    let col_taps = axis_taps::<T>(ow, w, rate, method);
    let row_taps = axis_taps::<T>(oh, h, rate, method);

    // horizontal pass: h × ow
    let src = img.values();
    let mut horiz = vec![T::zero(); h * ow];
    horiz.par_chunks_mut(ow).enumerate().for_each(|(r, out)| {
        let row = &src[r * w..(r + 1) * w];
        for (o, taps) in out.iter_mut().zip(&col_taps) {
            *o = taps.iter().fold(T::zero(), |acc, &(c, wt)| acc + wt * row[c]);
        }
    });

    let mut data = vec![T::zero(); oh * ow];
    data.par_chunks_mut(ow).enumerate().for_each(|(r, out)| {
        let taps = &row_taps[r];
        for (c, o) in out.iter_mut().enumerate() {
            let v = taps.iter().fold(T::zero(), |acc, &(sr, wt)| acc + wt * horiz[sr * ow + c]);
            *o = v.max(T::zero()).min(T::one());
        }
    });
    Image::new(ow, oh, data)
}

/// Reconstruction from a simulated `×rate` initial scan of `hr`, cropped back to its size.
pub fn simulate_reconstruction<T: Scalar>(hr: &Image<T>, rate: usize, method: Interpolation) -> Result<Image<T>> {
    let lr = downsample_nearest(hr, rate)?;
    upsample(&lr, rate, method)?.crop(hr.width(), hr.height())
}

/// Final output: high-resolution pixels where `b` is set, reconstruction elsewhere.
pub fn composite<T: Scalar>(sr: &Image<T>, hr: &Image<T>, b: &Bitmap) -> Result<Image<T>> {
    check_same_dims(sr.dims(), hr.dims())?;
    check_same_dims(sr.dims(), b.dims())?;
    let data = sr
        .values()
        .iter()
        .zip(hr.values())
        .zip(b.bits())
        .map(|((&s, &h), &bit)| if bit { h } else { s })
        .collect();
    Image::new(sr.width(), sr.height(), data)
}
