//! Replacement autoencoder.
//!
//! Training pairs every white and gray window with itself and every black
//! window with a randomly drawn gray window. An autoencoder fitted to those
//! pairs reproduces desired and neutral sections while rewriting sensitive
//! ones into neutral-looking output.

pub(crate) mod model;
mod pairs;
mod topology;
mod train;

pub use model::{
    load_model, save_model, IdentityTransform, TrainedRae, WindowTransform, MODEL_MAGIC,
    MODEL_VERSION,
};
pub use pairs::{build_replacement_pairs, ReplacementPair};
pub use topology::{build_rae_topology, Profile, RaeTopology};
pub use train::{train_rae, RaeTrainConfig};
