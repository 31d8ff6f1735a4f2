use serde::{Deserialize, Serialize};

use super::Tensor2;

/// Scale of the self-normalizing exponential linear unit.
pub const SELU_LAMBDA: f64 = 1.050_700_987_355_480_5;
/// Negative-branch saturation constant of SELU.
pub const SELU_ALPHA: f64 = 1.673_263_242_354_377_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    Selu,
    Sigmoid,
    /// Row-wise; only meaningful as an output activation.
    Softmax,
    Tanh,
}

impl Activation {
    pub const ALL: [Activation; 5] = [
        Activation::Linear,
        Activation::Selu,
        Activation::Sigmoid,
        Activation::Softmax,
        Activation::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Selu => "selu",
            Activation::Sigmoid => "sigmoid",
            Activation::Softmax => "softmax",
            Activation::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Applies the activation to one vector (one sample).
    pub fn apply(self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        self.apply_in_place(&mut out);
        out
    }

    pub(crate) fn apply_in_place(self, v: &mut [f64]) {
        match self {
            Activation::Linear => {}
            Activation::Selu => v.iter_mut().for_each(|x| *x = selu(*x)),
            Activation::Sigmoid => v.iter_mut().for_each(|x| *x = sigmoid(*x)),
            Activation::Tanh => v.iter_mut().for_each(|x| *x = x.tanh()),
            Activation::Softmax => softmax_in_place(v),
        }
    }

    pub(crate) fn apply_rows(self, t: &mut Tensor2) {
        if self == Activation::Linear {
            return;
        }
        let cols = t.cols();
        if cols == 0 {
            return;
        }
        for row in t.data_mut().chunks_mut(cols) {
            self.apply_in_place(row);
        }
    }

    /// Maps the gradient w.r.t. activation outputs to the gradient w.r.t.
    /// pre-activations, in place. `pre` and `post` are one sample's values.
    pub(crate) fn backward_in_place(self, pre: &[f64], post: &[f64], grad: &mut [f64]) {
        match self {
            Activation::Linear => {}
            Activation::Selu => {
                for ((g, &z), &a) in grad.iter_mut().zip(pre).zip(post) {
                    *g *= if z > 0.0 {
                        SELU_LAMBDA
                    } else {
                        a + SELU_LAMBDA * SELU_ALPHA
                    };
                }
            }
            Activation::Sigmoid => {
                for (g, &a) in grad.iter_mut().zip(post) {
                    *g *= a * (1.0 - a);
                }
            }
            Activation::Tanh => {
                for (g, &a) in grad.iter_mut().zip(post) {
                    *g *= 1.0 - a * a;
                }
            }
            Activation::Softmax => {
                let s: f64 = grad.iter().zip(post).map(|(g, a)| g * a).sum();
                for (g, &a) in grad.iter_mut().zip(post) {
                    *g = a * (*g - s);
                }
            }
        }
    }
}

#[inline]
pub fn selu(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA * x
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp_m1()
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}
