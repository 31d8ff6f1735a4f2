use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tensor::axpy;
use super::{Activation, DenseLayer, Loss, Tensor2};
use crate::{Error, Result};

/// Ordered stack of dense layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

/// Per-layer inputs and pre-activations retained by a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `inputs[i]` is the input to layer `i`; the last entry is the network output.
    inputs: Vec<Tensor2>,
    pre: Vec<Tensor2>,
}

impl ForwardCache {
    pub fn output(&self) -> &Tensor2 {
        self.inputs.last().expect("cache always holds the batch")
    }

    pub fn into_output(mut self) -> Tensor2 {
        self.inputs.pop().expect("cache always holds the batch")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Tensor2,
    pub bias: Vec<f64>,
}

/// Gradients for every layer, same shapes as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|g| g.weights.is_finite() && g.bias.iter().all(|b| b.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|g| g.weights.data().iter().chain(&g.bias))
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::shape("a network needs at least one layer"));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::shape(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    pair[0].output_dim(),
                    i + 1,
                    pair[1].input_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Builds a randomly initialised stack. `sizes` lists every width
    /// including the input, so `sizes.len() == activations.len() + 1`.
    pub fn random<R: Rng + ?Sized>(
        sizes: &[usize],
        activations: &[Activation],
        rng: &mut R,
    ) -> Result<Self> {
        if sizes.len() != activations.len() + 1 {
            return Err(Error::shape(format!(
                "{} sizes need {} activations, got {}",
                sizes.len(),
                sizes.len().saturating_sub(1),
                activations.len()
            )));
        }
        let layers = sizes
            .windows(2)
            .zip(activations)
            .map(|(w, &act)| DenseLayer::random(w[0], w[1], act, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.input_dim() * l.output_dim() + l.output_dim())
            .sum()
    }

    /// Rounds every parameter to the nearest `f32`, the precision used by
    /// model files.
    pub fn round_to_f32(&mut self) {
        for l in &mut self.layers {
            for w in l.weights_mut().data_mut() {
                *w = *w as f32 as f64;
            }
            for b in l.bias_mut() {
                *b = *b as f32 as f64;
            }
        }
    }

    fn check_input(&self, batch: &Tensor2) -> Result<()> {
        if batch.cols() != self.input_dim() {
            return Err(Error::shape(format!(
                "batch has {} columns, network expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, batch: &Tensor2) -> Result<Tensor2> {
        self.check_input(batch)?;
        let mut x = batch.clone();
        for layer in &self.layers {
            let mut z = layer.affine(&x)?;
            layer.activation().apply_rows(&mut z);
            x = z;
        }
        Ok(x)
    }

    pub fn forward_cached(&self, batch: &Tensor2) -> Result<ForwardCache> {
        self.check_input(batch)?;
        let mut inputs = Vec::with_capacity(self.layers.len() + 1);
        let mut pre = Vec::with_capacity(self.layers.len());
        inputs.push(batch.clone());
        for layer in &self.layers {
            let z = layer.affine(inputs.last().unwrap())?;
            let mut a = z.clone();
            layer.activation().apply_rows(&mut a);
            pre.push(z);
            inputs.push(a);
        }
        Ok(ForwardCache { inputs, pre })
    }

    /// Backpropagates `grad_output` (gradient of the loss w.r.t. the network
    /// output) and returns parameter gradients plus the gradient w.r.t. the input.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_output: &Tensor2,
    ) -> Result<(Gradients, Tensor2)> {
        let out = cache.output();
        if grad_output.shape() != out.shape() {
            return Err(Error::shape(format!(
                "output gradient {:?} vs output {:?}",
                grad_output.shape(),
                out.shape()
            )));
        }
        let last = self.layers.len() - 1;
        let mut delta = grad_output.clone();
        activation_backward(
            self.layers[last].activation(),
            &cache.pre[last],
            out,
            &mut delta,
        );
        Ok(self.backward_from_pre(cache, delta))
    }

    /// Like [`Network::backward`] but starting from the gradient w.r.t. the
    /// last layer's pre-activation.
    pub fn backward_from_pre(
        &self,
        cache: &ForwardCache,
        mut delta: Tensor2,
    ) -> (Gradients, Tensor2) {
        let mut grads = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &cache.inputs[i];
            let (out_dim, in_dim) = (layer.output_dim(), layer.input_dim());

            let mut dw = Tensor2::zeros(out_dim, in_dim);
            let mut db = vec![0.0; out_dim];
            for r in 0..x.rows() {
                let d = delta.row(r);
                let xr = x.row(r);
                for (o, &g) in d.iter().enumerate() {
                    if g != 0.0 {
                        axpy(g, xr, dw.row_mut(o));
                    }
                    db[o] += g;
                }
            }

            let mut dx = Tensor2::zeros(x.rows(), in_dim);
            let w = layer.weights();
            for r in 0..x.rows() {
                let d = delta.row(r);
                let dst = dx.row_mut(r);
                for (o, &g) in d.iter().enumerate() {
                    if g != 0.0 {
                        axpy(g, w.row(o), dst);
                    }
                }
            }
            if i > 0 {
                let prev = &self.layers[i - 1];
                activation_backward(prev.activation(), &cache.pre[i - 1], x, &mut dx);
            }
            grads.push(LayerGrad {
                weights: dw,
                bias: db,
            });
            delta = dx;
        }
        grads.reverse();
        (Gradients { layers: grads }, delta)
    }

    /// Mean loss over the batch and its gradient w.r.t. every parameter.
    ///
    /// Sigmoid + binary cross-entropy and softmax + categorical cross-entropy
    /// use the combined `p - y` form at the output.
    pub fn backprop(
        &self,
        batch: &Tensor2,
        target: &Tensor2,
        loss: Loss,
    ) -> Result<(f64, Gradients)> {
        let cache = self.forward_cached(batch)?;
        let value = loss.eval(cache.output(), target)?;
        let delta = self.output_delta(&cache, target, loss)?;
        let (grads, _) = self.backward_from_pre(&cache, delta);
        Ok((value, grads))
    }

    /// Gradient of `loss` w.r.t. the last layer's pre-activation.
    pub fn output_delta(
        &self,
        cache: &ForwardCache,
        target: &Tensor2,
        loss: Loss,
    ) -> Result<Tensor2> {
        let out = cache.output();
        let act = self.layers[self.layers.len() - 1].activation();
        match (loss, act) {
            (Loss::BinaryCrossEntropy, Activation::Sigmoid)
            | (Loss::CategoricalCrossEntropy, Activation::Softmax) => {
                loss.check(out, target)?;
                let scale = if loss == Loss::BinaryCrossEntropy {
                    out.data().len()
                } else {
                    out.rows()
                }
                .max(1) as f64;
                let data = out
                    .data()
                    .iter()
                    .zip(target.data())
                    .map(|(p, y)| (p - y) / scale)
                    .collect();
                Tensor2::new(out.rows(), out.cols(), data)
            }
            _ => {
                let mut delta = loss.grad(out, target)?;
                activation_backward(act, &cache.pre[cache.pre.len() - 1], out, &mut delta);
                Ok(delta)
            }
        }
    }

    /// Visits every parameter, weights before bias, layer by layer.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights().data().iter().chain(l.bias()).copied())
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }
}

fn activation_backward(act: Activation, pre: &Tensor2, post: &Tensor2, grad: &mut Tensor2) {
    if act == Activation::Linear {
        return;
    }
    let cols = grad.cols();
    for r in 0..grad.rows() {
        act.backward_in_place(
            pre.row(r),
            post.row(r),
            &mut grad.data_mut()[r * cols..(r + 1) * cols],
        );
    }
}
