//! Minimal dense neural-network engine.
//!
//! Everything is `f64` internally. Batches are row-major [`Tensor2`]s with one
//! sample per row; layer weights have shape `(out, in)`.

mod activation;
mod fit;
mod gradcheck;
mod init;
mod layer;
mod loss;
mod network;
mod optim;
mod tensor;

pub use activation::{Activation, SELU_ALPHA, SELU_LAMBDA};
pub use fit::{fit, FitConfig};
pub use gradcheck::{max_relative_error, numeric_gradients};
pub use init::{glorot_uniform, init_weights};
pub use layer::DenseLayer;
pub use loss::Loss;
pub use network::{ForwardCache, Gradients, LayerGrad, Network};
pub use optim::{Optimizer, OptimizerKind};
pub use tensor::Tensor2;
