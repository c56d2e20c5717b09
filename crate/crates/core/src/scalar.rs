//! Floating point abstraction shared by every raster and sampler type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used for pixel values, saliency and kernel entries: `f32` or `f64`.
///
/// Everything except the dense symmetric eigensolve is written against the
/// `num-traits` surface; the eigensolve is provided per concrete type.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// Eigen-decomposition of a dense symmetric `n × n` matrix stored row-major.
    ///
    /// Returns `(eigenvalues, eigenvectors)` with eigenvector `k` stored in
    /// column `k` of a row-major `n × n` buffer. Order is unspecified.
    /// `None` if the solver fails to converge.
    fn symmetric_eigen(n: usize, entries: &[Self]) -> Option<(Vec<Self>, Vec<Self>)>;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn symmetric_eigen(n: usize, entries: &[Self]) -> Option<(Vec<Self>, Vec<Self>)> {
                let m = faer::Mat::<$t>::from_fn(n, n, |r, c| entries[r * n + c]);
                let eig = m.self_adjoint_eigen(faer::Side::Lower).ok()?;
                let values = eig.S().column_vector().iter().copied().collect();
                let u = eig.U();
                let mut vectors = vec![0.0; n * n];
                for r in 0..n {
                    for c in 0..n {
                        vectors[r * n + c] = u[(r, c)];
                    }
                }
                Some((values, vectors))
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
