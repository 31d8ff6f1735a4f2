use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RaeTopology;
use crate::container::{self, BodyReader};
use crate::data::{InferencePartition, NormStats, Window};
use crate::nn::{Activation, DenseLayer, Network, Tensor2};
use crate::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"RAEMODEL";
pub const MODEL_VERSION: u32 = 1;

/// Anything that maps windows to same-shaped windows.
pub trait WindowTransform {
    fn transform_batch(&self, windows: &[Window]) -> Result<Vec<Window>>;
}

/// Returns its input; the baseline for "no transformation".
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTransform;

impl WindowTransform for IdentityTransform {
    fn transform_batch(&self, windows: &[Window]) -> Result<Vec<Window>> {
        Ok(windows.to_vec())
    }
}

/// A trained replacement autoencoder and everything needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedRae {
    network: Network,
    norm: NormStats,
    partition: InferencePartition,
    topology: RaeTopology,
    loss_history: Vec<f64>,
}

impl TrainedRae {
    pub fn new(
        network: Network,
        norm: NormStats,
        partition: InferencePartition,
        topology: RaeTopology,
        loss_history: Vec<f64>,
    ) -> Result<Self> {
        let inp = topology.channels * topology.window_len;
        if network.input_dim() != inp || network.output_dim() != inp || topology.input_dim != inp {
            return Err(Error::shape(format!(
                "network {}->{} does not match k·d = {inp}",
                network.input_dim(),
                network.output_dim()
            )));
        }
        if norm.channels() != topology.channels {
            return Err(Error::shape(
                "normalizer channel count differs from topology",
            ));
        }
        Ok(Self {
            network,
            norm,
            partition,
            topology,
            loss_history,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn norm(&self) -> &NormStats {
        &self.norm
    }

    pub fn partition(&self) -> &InferencePartition {
        &self.partition
    }

    pub fn topology(&self) -> &RaeTopology {
        &self.topology
    }

    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    /// `(channels, window length)`.
    pub fn window_shape(&self) -> (usize, usize) {
        (self.topology.channels, self.topology.window_len)
    }

    fn check(&self, w: &Window) -> Result<()> {
        if w.shape() != self.window_shape() {
            return Err(Error::shape(format!(
                "window {:?} does not match model {:?}",
                w.shape(),
                self.window_shape()
            )));
        }
        Ok(())
    }

    /// Transforms a normalized window. The output keeps the input's label.
    pub fn transform_window(&self, window: &Window) -> Result<Window> {
        Ok(self
            .transform_batch(std::slice::from_ref(window))?
            .remove(0))
    }

    /// Normalizes a raw-unit window with the stored statistics, transforms it,
    /// and maps the result back to raw units.
    pub fn transform_raw_window(&self, window: &Window) -> Result<Window> {
        self.check(window)?;
        let normalized = self.norm.apply_window(window)?;
        let mut out = self.transform_window(&normalized)?;
        self.norm.denormalize_flat(out.values_mut().data_mut())?;
        Ok(out)
    }

    /// Raw-unit transform at wire precision: channels-first `k·d` floats in
    /// and out.
    pub fn transform_raw_f32(&self, raw: &[f32]) -> Result<Vec<f32>> {
        let (k, d) = self.window_shape();
        if raw.len() != k * d {
            return Err(Error::shape(format!(
                "{} values sent, model expects {}",
                raw.len(),
                k * d
            )));
        }
        let values: Vec<f64> = raw.iter().map(|&v| f64::from(v)).collect();
        let window = Window::from_flat(k, d, values, 0)?;
        let out = self.transform_raw_window(&window)?;
        Ok(out.flat().iter().map(|&v| v as f32).collect())
    }
}

impl WindowTransform for TrainedRae {
    fn transform_batch(&self, windows: &[Window]) -> Result<Vec<Window>> {
        if windows.is_empty() {
            return Ok(Vec::new());
        }
        for w in windows {
            self.check(w)?;
        }
        let batch = Tensor2::from_rows(&windows.iter().map(Window::flat).collect::<Vec<_>>())?;
        let out = self.network.forward(&batch)?;
        let (k, d) = self.window_shape();
        windows
            .iter()
            .zip(out.iter_rows())
            .map(|(w, row)| Window::from_flat(k, d, row.to_vec(), w.label))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ModelMeta {
    channels: usize,
    window_len: usize,
    topology: RaeTopology,
    /// `(out, in)` and activation name of every layer, in file order.
    layers: Vec<LayerMeta>,
    partition: InferencePartition,
    norm: NormStats,
    loss_history: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct LayerMeta {
    out: usize,
    #[serde(rename = "in")]
    inp: usize,
    activation: String,
}

fn encode_network(net: &Network, body: &mut Vec<u8>) {
    for l in net.layers() {
        container::push_f32s(body, l.weights().data().iter().copied());
        container::push_f32s(body, l.bias().iter().copied());
    }
}

pub(crate) fn layer_meta(net: &Network) -> Vec<LayerMeta> {
    net.layers()
        .iter()
        .map(|l| LayerMeta {
            out: l.output_dim(),
            inp: l.input_dim(),
            activation: l.activation().name().to_string(),
        })
        .collect()
}

pub(crate) fn decode_network(layers: &[LayerMeta], body: &mut BodyReader<'_>) -> Result<Network> {
    let layers = layers
        .iter()
        .map(|m| {
            let act = Activation::from_name(&m.activation)
                .ok_or_else(|| Error::Format(format!("unknown activation {:?}", m.activation)))?;
            let w = Tensor2::new(m.out, m.inp, body.f32s(m.out * m.inp)?)?;
            let b = body.f32s(m.out)?;
            DenseLayer::new(w, b, act)
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(layers)
}

pub(crate) fn network_to_bytes<M: Serialize>(
    magic: &'static [u8; 8],
    version: u32,
    meta: &M,
    net: &Network,
) -> Result<Vec<u8>> {
    let mut body = Vec::with_capacity(net.num_params() * 4);
    encode_network(net, &mut body);
    container::encode(magic, version, meta, &body)
}

impl TrainedRae {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let meta = ModelMeta {
            channels: self.topology.channels,
            window_len: self.topology.window_len,
            topology: self.topology.clone(),
            layers: layer_meta(&self.network),
            partition: self.partition.clone(),
            norm: self.norm.clone(),
            loss_history: self.loss_history.clone(),
        };
        network_to_bytes(MODEL_MAGIC, MODEL_VERSION, &meta, &self.network)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let c = container::decode::<ModelMeta>(bytes, MODEL_MAGIC, "RAEMODEL", MODEL_VERSION)?;
        let mut body = BodyReader::new(&c.body);
        let net = decode_network(&c.meta.layers, &mut body)?;
        body.finish()?;
        if c.meta.channels != c.meta.topology.channels
            || c.meta.window_len != c.meta.topology.window_len
        {
            return Err(Error::Format("metadata shape fields disagree".into()));
        }
        TrainedRae::new(
            net,
            c.meta.norm,
            c.meta.partition,
            c.meta.topology,
            c.meta.loss_history,
        )
    }
}

/// Writes the model file, creating parent directories.
pub fn save_model(model: &TrainedRae, path: impl AsRef<Path>) -> Result<()> {
    container::write_file(path.as_ref(), &model.to_bytes()?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedRae> {
    TrainedRae::from_bytes(&fs::read(path)?)
}
