//! Turns arbitrary binary files into image datasets.
//!
//! Two views are produced per file: a sliding-window Shannon entropy map
//! (colormapped and raw) and a grayscale byte image resampled to a fixed
//! size. The [`dataset`] module drives both over a class-per-directory
//! corpus, and [`eval`] scores a nearest-centroid baseline on the result.

pub mod dataset;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod exec;
pub mod grayscale;
pub mod imaging;
pub mod synth;

pub use entropy::{normalize_minmax, shannon_entropy, sliding_entropy, EntropyConfig, EntropyProfile, NormalizedProfile};
pub use error::{Error, Result};
pub use exec::Exec;
pub use grayscale::{bytes_to_matrix, matrix_to_bytes, resize_bicubic, ImageSpec, PixelMatrix};
pub use imaging::{apply_colormap, entropy_matrix, ColorMap, EncodePng, RgbImage};
