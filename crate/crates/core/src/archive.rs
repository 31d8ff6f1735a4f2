//! Prepared-window archive passed between pipeline stages.
//!
//! Same container layout as the model file with magic `RAEWINDS`. The body
//! holds the training windows then the test windows as channels-first `f32`,
//! followed by one `u32` label per window in the same order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::container::{self, BodyReader};
use crate::data::{InferencePartition, NormStats, Window};
use crate::{Error, Result};

pub const ARCHIVE_MAGIC: &[u8; 8] = b"RAEWINDS";
pub const ARCHIVE_VERSION: u32 = 1;

/// Normalized train/test windows plus the statistics used to normalize them.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedWindows {
    pub channels: usize,
    pub window_len: usize,
    pub step: usize,
    pub norm: NormStats,
    pub partition: InferencePartition,
    pub train: Vec<Window>,
    pub test: Vec<Window>,
}

#[derive(Serialize, Deserialize)]
struct ArchiveMeta {
    channels: usize,
    window_len: usize,
    step: usize,
    n_train: usize,
    n_test: usize,
    norm: NormStats,
    partition: InferencePartition,
}

impl PreparedWindows {
    /// Rounds every window value to `f32`, the archive's storage precision.
    pub fn round_to_f32(&mut self) {
        for w in self.train.iter_mut().chain(self.test.iter_mut()) {
            for v in w.values_mut().data_mut() {
                *v = *v as f32 as f64;
            }
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let shape = (self.channels, self.window_len);
        if self
            .train
            .iter()
            .chain(&self.test)
            .any(|w| w.shape() != shape)
        {
            return Err(Error::shape(
                "archive windows differ from the declared shape",
            ));
        }
        let meta = ArchiveMeta {
            channels: self.channels,
            window_len: self.window_len,
            step: self.step,
            n_train: self.train.len(),
            n_test: self.test.len(),
            norm: self.norm.clone(),
            partition: self.partition.clone(),
        };
        let all = || self.train.iter().chain(&self.test);
        let mut body = Vec::new();
        container::push_f32s(&mut body, all().flat_map(|w| w.flat().iter().copied()));
        container::push_u32s(&mut body, all().map(|w| w.label));
        container::encode(ARCHIVE_MAGIC, ARCHIVE_VERSION, &meta, &body)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let c =
            container::decode::<ArchiveMeta>(bytes, ARCHIVE_MAGIC, "RAEWINDS", ARCHIVE_VERSION)?;
        let m = c.meta;
        let per = m.channels * m.window_len;
        let n = m.n_train + m.n_test;
        let mut body = BodyReader::new(&c.body);
        let values = body.f32s(n * per)?;
        let labels = body.u32s(n)?;
        body.finish()?;
        let mut windows = values
            .chunks(per.max(1))
            .take(n)
            .zip(labels)
            .map(|(v, l)| Window::from_flat(m.channels, m.window_len, v.to_vec(), l))
            .collect::<Result<Vec<_>>>()?;
        let test = windows.split_off(m.n_train);
        Ok(Self {
            channels: m.channels,
            window_len: m.window_len,
            step: m.step,
            norm: m.norm,
            partition: m.partition,
            train: windows,
            test,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        container::write_file(path.as_ref(), &self.to_bytes()?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
