use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty window")]
    EmptyWindow,

    #[error("empty input")]
    EmptyInput,

    #[error("empty profile")]
    EmptyProfile,

    #[error("invalid padding: pad_len {pad_len} for side {side}")]
    InvalidPadding { side: usize, pad_len: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid ratios: {0}")]
    InvalidRatios(String),

    #[error("class {0:?} has no samples")]
    EmptyClass(String),

    #[error("feature side {feature} exceeds image side {image}")]
    FeatureSide { feature: usize, image: usize },

    #[error("confusion matrix is empty")]
    EmptyConfusion,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: png: {message}")]
    Png { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
