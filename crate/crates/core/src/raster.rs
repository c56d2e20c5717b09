//! Raster types and the decimation that simulates the initial low-resolution scan.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Read access shared by every scalar raster.
pub trait Raster {
    type Value: Scalar;

    fn width(&self) -> usize;
    fn height(&self) -> usize;
    /// Row-major pixel values.
    fn values(&self) -> &[Self::Value];

    #[inline]
    fn len(&self) -> usize {
        self.width() * self.height()
    }

    #[inline]
    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> Self::Value {
        self.values()[row * self.width() + col]
    }

    #[inline]
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }
}

pub(crate) fn check_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            left_w: a.0,
            left_h: a.1,
            right_w: b.0,
            right_h: b.1,
        });
    }
    Ok(())
}

fn check_len(width: usize, height: usize, len: usize) -> Result<()> {
    if width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidRaster(format!(
            "{width}x{height} raster needs {} values, got {len}",
            width.saturating_mul(height)
        )));
    }
    Ok(())
}

macro_rules! raster_impl {
    ($name:ident) => {
        impl<T: Scalar> Raster for $name<T> {
            type Value = T;

            #[inline]
            fn width(&self) -> usize {
                self.width
            }

            #[inline]
            fn height(&self) -> usize {
                self.height
            }

            #[inline]
            fn values(&self) -> &[T] {
                &self.data
            }
        }

        impl<T: Scalar> $name<T> {
            pub fn into_values(self) -> Vec<T> {
                self.data
            }
        }
    };
}

/// Grayscale intensity image with every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Image<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_len(width, height, data.len())?;
        if let Some(v) = data.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::InvalidRaster(format!("image value {v} outside [0, 1]")));
        }
        Ok(Self { width, height, data })
    }

    /// Builds an image, clamping every value into `[0, 1]`. NaN is still rejected.
    pub fn from_clamped(width: usize, height: usize, mut data: Vec<T>) -> Result<Self> {
        for v in &mut data {
            if v.is_nan() {
                return Err(Error::InvalidRaster("image value is NaN".into()));
            }
            *v = v.max(T::zero()).min(T::one());
        }
        Self::new(width, height, data)
    }

    pub fn constant(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    /// Top-left `width × height` window.
    pub fn crop(&self, width: usize, height: usize) -> Result<Self> {
        if width > self.width || height > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop {width}x{height} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            data.extend_from_slice(&self.data[r * self.width..r * self.width + width]);
        }
        Ok(Self { width, height, data })
    }

    pub fn cast<U: Scalar>(&self) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

raster_impl!(Image);

/// Non-negative, finite per-pixel field: ground-truth error, estimated error or saliency.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> ErrorMap<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_len(width, height, data.len())?;
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
            return Err(Error::InvalidRaster(format!(
                "error map value {v} is negative or non-finite"
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![T::zero(); width * height],
        }
    }

    /// Copy with every pixel set in `mask` forced to zero.
    pub fn zeroed_where(&self, mask: &Bitmap) -> Result<Self> {
        check_same_dims(self.dims(), mask.dims())?;
        let data = self
            .data
            .iter()
            .zip(mask.bits())
            .map(|(&v, &b)| if b { T::zero() } else { v })
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            data,
        })
    }
}

raster_impl!(ErrorMap);

impl<T: Scalar> From<Image<T>> for ErrorMap<T> {
    fn from(img: Image<T>) -> Self {
        Self {
            width: img.width,
            height: img.height,
            data: img.data,
        }
    }
}

/// Per-pixel probability in `[0, 1]`: ROI detector output or estimator output.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> ProbabilityMap<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_len(width, height, data.len())?;
        if let Some(v) = data.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::InvalidRaster(format!("probability {v} outside [0, 1]")));
        }
        Ok(Self { width, height, data })
    }
}

raster_impl!(ProbabilityMap);

impl<T: Scalar> From<Image<T>> for ProbabilityMap<T> {
    fn from(img: Image<T>) -> Self {
        Self {
            width: img.width,
            height: img.height,
            data: img.data,
        }
    }
}

impl<T: Scalar> From<ProbabilityMap<T>> for ErrorMap<T> {
    fn from(p: ProbabilityMap<T>) -> Self {
        Self {
            width: p.width,
            height: p.height,
            data: p.data,
        }
    }
}

impl<T: Scalar> TryFrom<ErrorMap<T>> for ProbabilityMap<T> {
    type Error = Error;

    fn try_from(e: ErrorMap<T>) -> Result<Self> {
        Self::new(e.width, e.height, e.data)
    }
}

/// Boolean per-pixel mask of scanned or rescanned locations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitmap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_len(width, height, bits.len())?;
        Ok(Self { width, height, bits })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    /// Bitmap with exactly the given row-major indices set.
    pub fn from_indices(width: usize, height: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut b = Self::zeros(width, height);
        for i in indices {
            if i >= b.bits.len() {
                return Err(Error::InvalidParameter(format!(
                    "index {i} outside {width}x{height} bitmap"
                )));
            }
            b.bits[i] = true;
        }
        Ok(b)
    }

    /// Pixels visited by the initial scan at decimation `rate`.
    pub fn lattice(width: usize, height: usize, rate: usize) -> Result<Self> {
        if rate == 0 {
            return Err(Error::InvalidParameter("decimation rate must be >= 1".into()));
        }
        let mut b = Self::zeros(width, height);
        for r in (0..height).step_by(rate) {
            for c in (0..width).step_by(rate) {
                b.bits[r * width + c] = true;
            }
        }
        Ok(b)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &Bitmap) -> Result<Bitmap> {
        check_same_dims(self.dims(), other.dims())?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect();
        Ok(Bitmap {
            width: self.width,
            height: self.height,
            bits,
        })
    }

    pub fn intersects(&self, other: &Bitmap) -> bool {
        self.bits.iter().zip(&other.bits).any(|(a, b)| *a && *b)
    }

    pub fn complement(&self) -> Bitmap {
        Bitmap {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// Decimates `img` by keeping every `rate`-th pixel, anchored at the top-left.
///
/// Output dimensions are `⌈w/rate⌉ × ⌈h/rate⌉`; the sample index is clamped to
/// the last row/column so non-divisible sizes never read out of bounds.
pub fn downsample_nearest<T: Scalar>(img: &Image<T>, rate: usize) -> Result<Image<T>> {
    if rate == 0 {
        return Err(Error::InvalidParameter("decimation rate must be >= 1".into()));
    }
    let (w, h) = img.dims();
    let ow = w.div_ceil(rate);
    let oh = h.div_ceil(rate);
    let mut data = Vec::with_capacity(ow * oh);
    for i in 0..oh {
        let r = (i * rate).min(h - 1);
        for j in 0..ow {
            let c = (j * rate).min(w - 1);
            data.push(img.get(r, c));
        }
    }
    Image::new(ow, oh, data)
}
