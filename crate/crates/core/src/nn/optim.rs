use serde::{Deserialize, Serialize};

use super::{Gradients, Network};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
}

impl OptimizerKind {
    pub fn adam() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Optimizer with its per-parameter state. Moments are laid out layer by
/// layer, weights then bias, matching [`Network::params`].
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step_count: u64,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64, net: &Network) -> Self {
        let sizes: Vec<usize> = net
            .layers()
            .iter()
            .map(|l| l.input_dim() * l.output_dim() + l.output_dim())
            .collect();
        let moments = || sizes.iter().map(|&n| vec![0.0; n]).collect::<Vec<_>>();
        let (m, v) = match kind {
            OptimizerKind::Sgd => (Vec::new(), Vec::new()),
            OptimizerKind::Adam { .. } => (moments(), moments()),
        };
        Self {
            kind,
            learning_rate,
            m,
            v,
            step_count: 0,
        }
    }

    /// Adam with lr 1e-3, β₁ 0.9, β₂ 0.999, ε 1e-8.
    pub fn adam(net: &Network) -> Self {
        Self::new(OptimizerKind::adam(), 1e-3, net)
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn first_moments(&self) -> &[Vec<f64>] {
        &self.m
    }

    pub fn second_moments(&self) -> &[Vec<f64>] {
        &self.v
    }

    /// Applies one update. Gradients must come from the same network shape.
    pub fn step(&mut self, net: &mut Network, grads: &Gradients) {
        assert_eq!(
            net.layers().len(),
            grads.layers.len(),
            "gradient/network layer count"
        );
        self.step_count += 1;
        let lr = self.learning_rate;
        match self.kind {
            OptimizerKind::Sgd => {
                for (layer, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
                    for (w, dw) in layer
                        .weights_mut()
                        .data_mut()
                        .iter_mut()
                        .zip(g.weights.data())
                    {
                        *w -= lr * dw;
                    }
                    for (b, db) in layer.bias_mut().iter_mut().zip(&g.bias) {
                        *b -= lr * db;
                    }
                }
            }
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            } => {
                let t = self.step_count as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    let m_hat = *m / c1;
                    let v_hat = *v / c2;
                    *p -= lr * m_hat / (v_hat.sqrt() + epsilon);
                };
                for (((layer, g), m), v) in net
                    .layers_mut()
                    .iter_mut()
                    .zip(&grads.layers)
                    .zip(&mut self.m)
                    .zip(&mut self.v)
                {
                    let nw = g.weights.data().len();
                    let (mw, mb) = m.split_at_mut(nw);
                    let (vw, vb) = v.split_at_mut(nw);
                    for (((p, &dg), mi), vi) in layer
                        .weights_mut()
                        .data_mut()
                        .iter_mut()
                        .zip(g.weights.data())
                        .zip(mw)
                        .zip(vw)
                    {
                        update(p, dg, mi, vi);
                    }
                    for (((p, &dg), mi), vi) in
                        layer.bias_mut().iter_mut().zip(&g.bias).zip(mb).zip(vb)
                    {
                        update(p, dg, mi, vi);
                    }
                }
            }
        }
    }
}
