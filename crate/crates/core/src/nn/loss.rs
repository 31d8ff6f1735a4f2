use serde::{Deserialize, Serialize};

use super::Tensor2;
use crate::{Error, Result};

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logs.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// Mean over every element of the batch.
    Mse,
    /// Mean over every element; targets in `[0, 1]`.
    BinaryCrossEntropy,
    /// Mean over rows of `-Σ y ln p`; target rows are distributions.
    CategoricalCrossEntropy,
}

impl Loss {
    pub fn eval(self, predicted: &Tensor2, target: &Tensor2) -> Result<f64> {
        self.check(predicted, target)?;
        let n = predicted.data().len();
        if n == 0 {
            return Ok(0.0);
        }
        let pairs = predicted.data().iter().zip(target.data());
        let value = match self {
            Loss::Mse => pairs.map(|(p, y)| (p - y) * (p - y)).sum::<f64>() / n as f64,
            Loss::BinaryCrossEntropy => {
                pairs
                    .map(|(&p, &y)| {
                        let p = p.clamp(EPS, 1.0 - EPS);
                        -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
                    })
                    .sum::<f64>()
                    / n as f64
            }
            Loss::CategoricalCrossEntropy => {
                pairs
                    .map(|(&p, &y)| if y == 0.0 { 0.0 } else { -y * p.max(EPS).ln() })
                    .sum::<f64>()
                    / predicted.rows() as f64
            }
        };
        // rounding can leave a tiny negative for bce at y∈(0,1)
        Ok(value.max(0.0))
    }

    /// Gradient of [`Loss::eval`] with respect to `predicted`.
    pub fn grad(self, predicted: &Tensor2, target: &Tensor2) -> Result<Tensor2> {
        self.check(predicted, target)?;
        let n = predicted.data().len().max(1) as f64;
        let rows = predicted.rows().max(1) as f64;
        let data = predicted
            .data()
            .iter()
            .zip(target.data())
            .map(|(&p, &y)| match self {
                Loss::Mse => 2.0 * (p - y) / n,
                Loss::BinaryCrossEntropy => {
                    if p <= EPS || p >= 1.0 - EPS {
                        0.0
                    } else {
                        (p - y) / (p * (1.0 - p)) / n
                    }
                }
                Loss::CategoricalCrossEntropy => {
                    if y == 0.0 || p <= EPS {
                        0.0
                    } else {
                        -y / p / rows
                    }
                }
            })
            .collect();
        Tensor2::new(predicted.rows(), predicted.cols(), data)
    }

    pub(crate) fn check(self, predicted: &Tensor2, target: &Tensor2) -> Result<()> {
        if predicted.shape() != target.shape() {
            return Err(Error::shape(format!(
                "prediction {:?} vs target {:?}",
                predicted.shape(),
                target.shape()
            )));
        }
        match self {
            Loss::Mse => {}
            Loss::BinaryCrossEntropy => {
                if let Some(y) = target.data().iter().find(|y| !(0.0..=1.0).contains(*y)) {
                    return Err(Error::InvalidTarget(format!(
                        "binary target {y} outside [0, 1]"
                    )));
                }
            }
            Loss::CategoricalCrossEntropy => {
                for (i, row) in target.iter_rows().enumerate() {
                    let s: f64 = row.iter().sum();
                    if row.iter().any(|&y| y < 0.0) || (s - 1.0).abs() > 1e-6 {
                        return Err(Error::InvalidTarget(format!(
                            "target row {i} is not a distribution"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
