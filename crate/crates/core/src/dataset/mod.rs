//! Class-per-directory corpora: scanning, batch extraction, statistics and splits.

pub mod batch;
pub mod manifest;
pub mod process;
pub mod rng;
pub mod scan;
pub mod split;
pub mod stats;

pub use batch::{run_batch, run_batch_with};
pub use manifest::{ExtractConfig, Manifest, Mode, SampleRecord, Status, Summary};
pub use process::{process_sample, process_sample_with, render, Artifacts};
pub use scan::{scan_dataset, scan_dataset_with};
pub use split::{split_dataset, Split, SplitAssignment, SplitRatios};
pub use stats::{compute_stats, DatasetStats};
