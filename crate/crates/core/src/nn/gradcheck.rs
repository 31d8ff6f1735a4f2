//! Finite-difference gradient checking.
//!
//! Independent of [`Network::backprop`]: every parameter is nudged in a copy
//! of the network and the loss re-evaluated from a plain forward pass.

use super::{DenseLayer, Gradients, LayerGrad, Loss, Network, Tensor2};
use crate::Result;

fn loss_at(net: &Network, x: &Tensor2, y: &Tensor2, loss: Loss) -> Result<f64> {
    loss.eval(&net.forward(x)?, y)
}

fn with_layer(net: &Network, index: usize, layer: DenseLayer) -> Result<Network> {
    let mut layers = net.layers().to_vec();
    layers[index] = layer;
    Network::new(layers)
}

/// Central-difference estimate of the loss gradient for every weight and
/// bias, with step `h`.
pub fn numeric_gradients(
    net: &Network,
    x: &Tensor2,
    y: &Tensor2,
    loss: Loss,
    h: f64,
) -> Result<Gradients> {
    let mut layers = Vec::with_capacity(net.layers().len());
    for (li, layer) in net.layers().iter().enumerate() {
        let probe = |w: &Tensor2, b: &[f64]| -> Result<f64> {
            let l = DenseLayer::new(w.clone(), b.to_vec(), layer.activation())?;
            loss_at(&with_layer(net, li, l)?, x, y, loss)
        };
        let (rows, cols) = (layer.weights().rows(), layer.weights().cols());
        let mut gw = Tensor2::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let mut w = layer.weights().clone();
                let v = w.get(r, c);
                w.set(r, c, v + h);
                let plus = probe(&w, layer.bias())?;
                w.set(r, c, v - h);
                let minus = probe(&w, layer.bias())?;
                gw.set(r, c, (plus - minus) / (2.0 * h));
            }
        }
        let mut gb = vec![0.0; layer.bias().len()];
        for (i, g) in gb.iter_mut().enumerate() {
            let mut b = layer.bias().to_vec();
            b[i] += h;
            let plus = probe(layer.weights(), &b)?;
            b[i] -= 2.0 * h;
            let minus = probe(layer.weights(), &b)?;
            *g = (plus - minus) / (2.0 * h);
        }
        layers.push(LayerGrad {
            weights: gw,
            bias: gb,
        });
    }
    Ok(Gradients { layers })
}

/// Largest `|a - n| / max(|a| + |n|, floor)` over all parameters. The floor
/// keeps parameters whose gradient is essentially zero from dominating.
pub fn max_relative_error(analytic: &Gradients, numeric: &Gradients, floor: f64) -> f64 {
    let pairs = analytic
        .layers
        .iter()
        .zip(&numeric.layers)
        .flat_map(|(a, n)| {
            a.weights
                .data()
                .iter()
                .zip(n.weights.data())
                .chain(a.bias.iter().zip(&n.bias))
        });
    pairs
        .map(|(a, n)| (a - n).abs() / (a.abs() + n.abs()).max(floor))
        .fold(0.0, f64::max)
}
