//! Replacement autoencoder toolkit.
//!
//! Trains an autoencoder that rewrites sensitive ("black-listed") windows of a
//! multichannel sensor stream into windows resembling non-sensitive
//! ("gray-listed") activity, while reproducing desired ("white-listed") and
//! gray-listed windows as faithfully as possible.
//!
//! The crate is organised as:
//!
//! - [`nn`]: a small dense network engine with analytic backpropagation.
//! - [`data`]: CSV loading, gap interpolation, normalization, windowing,
//!   partitioning and a synthetic benchmark generator.
//! - [`rae`]: topology, replacement pairing, training and the model file.
//! - [`eval`]: the stand-in third-party classifier and the F1 / confusion report.
//! - [`attack`]: GAN-based detectability study of replaced windows.
//! - [`archive`]: the prepared-window container used between pipeline stages.
//! - [`config`] and [`pipeline`]: experiment configuration and stage wiring.

pub mod archive;
pub mod attack;
pub mod config;
mod container;
pub mod data;
mod error;
pub mod eval;
pub mod nn;
pub mod pipeline;
pub mod rae;
pub mod seed;

pub use error::{Error, Result};
