//! Simulation and evaluation of learning-guided sparse SEM acquisition.
//!
//! A stored high-resolution image stands in for the specimen. The pipeline
//! decimates it to mimic a cheap initial scan, reconstructs, estimates the
//! per-pixel residual error, picks a sparse rescan bitmap with a weighted
//! determinantal point process (or a baseline), composites the rescanned pixels
//! and reports speedup against quality.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the common double-precision instantiations.

pub mod codec;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod reconstruct;
pub mod saliency;
pub mod scalar;
pub mod synth;
pub mod wdpp;

pub use error::{Error, Result};
pub use raster::{Bitmap, ErrorMap, Image, ProbabilityMap, Raster};
pub use scalar::Scalar;

pub type Image64 = raster::Image<f64>;
pub type Image32 = raster::Image<f32>;
pub type ErrorMap64 = raster::ErrorMap<f64>;
pub type ErrorMap32 = raster::ErrorMap<f32>;
pub type ProbabilityMap64 = raster::ProbabilityMap<f64>;
pub type ProbabilityMap32 = raster::ProbabilityMap<f32>;
pub type KernelMatrix64 = wdpp::KernelMatrix<f64>;
pub type EigenBasis64 = wdpp::EigenBasis<f64>;
pub type Threshold64 = saliency::Threshold<f64>;
pub type SparsificationCurve64 = metrics::SparsificationCurve<f64>;
