use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", path.display())]
    MissingFile { path: PathBuf },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed header: {reason}", path.display())]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("{}: unsupported format: {reason}", path.display())]
    Unsupported { path: PathBuf, reason: String },

    #[error("{}: payload size mismatch: expected {expected} bytes, found {found}", path.display())]
    PayloadSize {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {k} samples but the kernel has rank {rank}")]
    RankDeficient { k: usize, rank: usize },

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile { path }
        } else {
            Error::Io { path, source }
        }
    }

    /// True for failures caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::MissingFile { .. } | Error::Io { .. })
    }
}
