use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Loss, Network, Optimizer, OptimizerKind, Tensor2};
use crate::{Error, Result};

/// Mini-batch training settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 128,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::adam(),
        }
    }
}

/// Trains `net` on paired rows, reshuffling every epoch. Returns the mean
/// training loss of each epoch.
pub fn fit<R: Rng + ?Sized>(
    net: &mut Network,
    inputs: &Tensor2,
    targets: &Tensor2,
    loss: Loss,
    cfg: &FitConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if inputs.rows() != targets.rows() {
        return Err(Error::shape(format!(
            "{} inputs vs {} targets",
            inputs.rows(),
            targets.rows()
        )));
    }
    if inputs.rows() == 0 {
        return Err(Error::Data("nothing to train on".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::config("batch size must be positive"));
    }
    let mut opt = Optimizer::new(cfg.optimizer, cfg.learning_rate, net);
    let mut order: Vec<usize> = (0..inputs.rows()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let x = inputs.select_rows(chunk);
            let y = targets.select_rows(chunk);
            let (value, grads) = net.backprop(&x, &y, loss)?;
            if !value.is_finite() || !grads.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            opt.step(net, &grads);
            total += value * chunk.len() as f64;
        }
        history.push(total / inputs.rows() as f64);
    }
    Ok(history)
}
