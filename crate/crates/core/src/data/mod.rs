//! Time-series ingestion and preparation.
//!
//! Raw records are loaded from CSV, gaps are filled by linear interpolation,
//! channels are standardised with statistics fitted on the training split,
//! and the stream is cut into `k × d` windows labelled by majority vote.

mod csv;
mod interp;
mod norm;
mod partition;
mod sampling;
mod series;
mod synth;
mod window;

pub use csv::{load_csv, parse_csv, write_csv};
pub use interp::interpolate_missing;
pub use norm::{fit_normalizer, NormStats};
pub use partition::{partition_windows, Category, InferencePartition, PartitionedWindows};
pub use sampling::{downsample_class, split_train_test};
pub use series::{decimate, RawSeries};
pub use synth::{gen_synthetic, SyntheticConfig, SyntheticData};
pub use window::{majority_label, segment_windows, window_starts, Segmentation, Window};
