//! Weighted determinantal point process sampling of rescan locations.
//!
//! The kernel `L = U^γ S U^γ` couples per-pixel saliency `U` with a Gaussian
//! location similarity `S`, so draws favour salient pixels that are spread out.

mod baseline;
mod kernel;
mod sample;
mod tiled;

pub use baseline::{random_bitmap, random_bitmap_among, topk_bitmap, topk_bitmap_among};
pub use kernel::{build_kernel, eigendecompose, EigenBasis, KernelGeometry, KernelMatrix, EIGEN_CLAMP};
pub use sample::{dpp_sample, kdpp_sample, log_elementary_symmetric};
pub use tiled::{
    apportion, tile_rng, tiled_wdpp_bitmap, SampleBudget, TiledWdpp, DEFAULT_GAMMA, DEFAULT_SIGMA_S,
    DEFAULT_TILE, SALIENCY_FLOOR,
};
