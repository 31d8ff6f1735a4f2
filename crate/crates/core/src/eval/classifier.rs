use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::container::{self, BodyReader};
use crate::data::Window;
use crate::nn::{fit, Activation, FitConfig, Loss, Network, Tensor2};
use crate::rae::model::{decode_network, layer_meta, network_to_bytes, LayerMeta};
use crate::{seed, Error, Result};

const CLASSIFIER_MAGIC: &[u8; 8] = b"RAECLSFR";
const CLASSIFIER_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    #[serde(flatten)]
    pub fit: FitConfig,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            fit: FitConfig::default(),
            seed: 4,
        }
    }
}

/// Softmax classifier over `k·d` inputs: `inp → inp/4 → inp/16 → classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    network: Network,
    /// Class id of each output unit, ascending.
    classes: Vec<u32>,
    channels: usize,
    window_len: usize,
}

impl Classifier {
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn window_shape(&self) -> (usize, usize) {
        (self.channels, self.window_len)
    }

    fn batch(&self, windows: &[Window]) -> Result<Tensor2> {
        if let Some(w) = windows.iter().find(|w| w.shape() != self.window_shape()) {
            return Err(Error::shape(format!(
                "window {:?} does not match classifier {:?}",
                w.shape(),
                self.window_shape()
            )));
        }
        Tensor2::from_rows(&windows.iter().map(Window::flat).collect::<Vec<_>>())
    }

    /// Class probabilities, one row per window, columns in [`Classifier::classes`] order.
    pub fn probabilities(&self, windows: &[Window]) -> Result<Tensor2> {
        if windows.is_empty() {
            return Ok(Tensor2::zeros(0, self.classes.len()));
        }
        self.network.forward(&self.batch(windows)?)
    }

    /// Arg-max class per window; ties go to the lower output index.
    pub fn predict(&self, windows: &[Window]) -> Result<Vec<u32>> {
        let probs = self.probabilities(windows)?;
        Ok(probs.iter_rows().map(|r| self.classes[argmax(r)]).collect())
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Trains on original (untransformed) windows with categorical cross-entropy.
pub fn train_classifier(windows: &[Window], cfg: &ClassifierConfig) -> Result<Classifier> {
    let first = windows
        .first()
        .ok_or_else(|| Error::Data("cannot train a classifier on zero windows".into()))?;
    let (k, d) = first.shape();
    let classes: Vec<u32> = windows
        .iter()
        .map(|w| w.label)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if classes.len() < 2 {
        return Err(Error::Data(format!(
            "classifier needs at least two classes, found {}",
            classes.len()
        )));
    }
    let inp = k * d;
    let (h1, h2) = (inp / 4, inp / 16);
    if h2 == 0 {
        return Err(Error::Topology(format!(
            "input dimension {inp} is too small for the classifier (inp/16 = 0)"
        )));
    }
    let mut rng = seed::rng(seed::derive(cfg.seed, 0xC1A5));
    let mut network = Network::random(
        &[inp, h1, h2, classes.len()],
        &[Activation::Selu, Activation::Selu, Activation::Softmax],
        &mut rng,
    )?;
    let mut clf = Classifier {
        network: network.clone(),
        classes,
        channels: k,
        window_len: d,
    };
    let inputs = clf.batch(windows)?;
    let mut targets = Tensor2::zeros(windows.len(), clf.classes.len());
    for (r, w) in windows.iter().enumerate() {
        let c = clf
            .classes
            .binary_search(&w.label)
            .expect("label collected above");
        targets.set(r, c, 1.0);
    }
    fit(
        &mut network,
        &inputs,
        &targets,
        Loss::CategoricalCrossEntropy,
        &cfg.fit,
        &mut rng,
    )?;
    network.round_to_f32();
    clf.network = network;
    Ok(clf)
}

#[derive(Serialize, Deserialize)]
struct ClassifierMeta {
    channels: usize,
    window_len: usize,
    classes: Vec<u32>,
    layers: Vec<LayerMeta>,
}

pub fn save_classifier(clf: &Classifier, path: impl AsRef<Path>) -> Result<()> {
    let meta = ClassifierMeta {
        channels: clf.channels,
        window_len: clf.window_len,
        classes: clf.classes.clone(),
        layers: layer_meta(&clf.network),
    };
    let bytes = network_to_bytes(CLASSIFIER_MAGIC, CLASSIFIER_VERSION, &meta, &clf.network)?;
    container::write_file(path.as_ref(), &bytes)
}

pub fn load_classifier(path: impl AsRef<Path>) -> Result<Classifier> {
    let bytes = fs::read(path)?;
    let c = container::decode::<ClassifierMeta>(
        &bytes,
        CLASSIFIER_MAGIC,
        "RAECLSFR",
        CLASSIFIER_VERSION,
    )?;
    let mut body = BodyReader::new(&c.body);
    let network = decode_network(&c.meta.layers, &mut body)?;
    body.finish()?;
    if network.output_dim() != c.meta.classes.len()
        || network.input_dim() != c.meta.channels * c.meta.window_len
    {
        return Err(Error::Format(
            "classifier metadata disagrees with its layers".into(),
        ));
    }
    Ok(Classifier {
        network,
        classes: c.meta.classes,
        channels: c.meta.channels,
        window_len: c.meta.window_len,
    })
}
