use serde::{Deserialize, Serialize};

use super::{RaeTopology, ReplacementPair, TrainedRae};
use crate::data::{InferencePartition, NormStats};
use crate::nn::{fit, FitConfig, Loss, Tensor2};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaeTrainConfig {
    #[serde(flatten)]
    pub fit: FitConfig,
    pub seed: u64,
}

impl Default for RaeTrainConfig {
    fn default() -> Self {
        Self {
            fit: FitConfig::default(),
            seed: 3,
        }
    }
}

/// Fits the autoencoder to the replacement pairs with mean squared error.
///
/// Windows must already be normalized with `norm`. The returned model's
/// weights are rounded to `f32` so that a saved and reloaded model behaves
/// identically to the in-memory one.
pub fn train_rae(
    pairs: &[ReplacementPair],
    topology: &RaeTopology,
    cfg: &RaeTrainConfig,
    norm: NormStats,
    partition: InferencePartition,
) -> Result<TrainedRae> {
    if pairs.is_empty() {
        return Err(Error::Data("no replacement pairs to train on".into()));
    }
    let shape = (topology.channels, topology.window_len);
    if let Some(p) = pairs
        .iter()
        .find(|p| p.input.shape() != shape || p.target.shape() != shape)
    {
        return Err(Error::shape(format!(
            "pair of shape {:?} -> {:?} does not match topology {shape:?}",
            p.input.shape(),
            p.target.shape()
        )));
    }
    let inputs = Tensor2::from_rows(&pairs.iter().map(|p| p.input.flat()).collect::<Vec<_>>())?;
    let targets = Tensor2::from_rows(&pairs.iter().map(|p| p.target.flat()).collect::<Vec<_>>())?;

    let mut net = topology.build_network(seed::derive(cfg.seed, 0x1417))?;
    let mut rng = seed::rng(seed::derive(cfg.seed, 0x5417));
    let history = fit(&mut net, &inputs, &targets, Loss::Mse, &cfg.fit, &mut rng)?;
    net.round_to_f32();
    TrainedRae::new(net, norm, partition, topology.clone(), history)
}
