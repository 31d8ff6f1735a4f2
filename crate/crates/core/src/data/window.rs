use std::collections::BTreeMap;

use super::RawSeries;
use crate::nn::Tensor2;
use crate::{Error, Result};

/// One `k × d` section (channels × time) and its class.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    values: Tensor2,
    pub label: u32,
}

impl Window {
    pub fn new(values: Tensor2, label: u32) -> Result<Self> {
        if !values.is_finite() {
            return Err(Error::Data(
                "window contains missing or non-finite values".into(),
            ));
        }
        Ok(Self { values, label })
    }

    /// From a flattened channels-first buffer.
    pub fn from_flat(channels: usize, len: usize, data: Vec<f64>, label: u32) -> Result<Self> {
        Self::new(Tensor2::new(channels, len, data)?, label)
    }

    pub fn values(&self) -> &Tensor2 {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut Tensor2 {
        &mut self.values
    }

    /// `(channels, length)`.
    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn channels(&self) -> usize {
        self.values.rows()
    }

    pub fn len(&self) -> usize {
        self.values.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.values.cols() == 0
    }

    pub fn channel(&self, ch: usize) -> &[f64] {
        self.values.row(ch)
    }

    /// Channels-first flattening, the layout fed to networks and sent on the wire.
    pub fn flat(&self) -> &[f64] {
        self.values.data()
    }
}

/// Result of [`segment_windows`]. `too_short` is set when the series is shorter
/// than one window, in which case `windows` is empty.
#[derive(Debug, Clone, Default)]
pub struct Segmentation {
    pub windows: Vec<Window>,
    pub too_short: bool,
}

/// Start offsets `0, w, 2w, …` of every full window of length `d` in a stream of `t` records.
pub fn window_starts(t: usize, d: usize, w: usize) -> Vec<usize> {
    if d == 0 || w == 0 || t < d {
        return Vec::new();
    }
    (0..=(t - d)).step_by(w).collect()
}

/// Most frequent label; ties go to the smallest class id.
pub fn majority_label(labels: &[u32]) -> Option<u32> {
    let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in labels {
        *hist.entry(l).or_default() += 1;
    }
    // BTreeMap iterates ascending; keep the first maximum
    let mut best: Option<(u32, usize)> = None;
    for (l, c) in hist {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best.map(|(l, _)| l)
}

/// Cuts a gap-free series into sliding windows of length `d` with step `w`.
pub fn segment_windows(series: &RawSeries, d: usize, w: usize) -> Result<Segmentation> {
    if d == 0 || w == 0 {
        return Err(Error::config("window length and step must be positive"));
    }
    if series.has_missing() {
        return Err(Error::Data(
            "series still has missing values; interpolate first".into(),
        ));
    }
    if series.len() < d {
        return Ok(Segmentation {
            windows: Vec::new(),
            too_short: true,
        });
    }
    let k = series.channels();
    let windows = window_starts(series.len(), d, w)
        .into_iter()
        .map(|start| {
            let mut data = vec![0.0; k * d];
            for i in 0..d {
                for (ch, &v) in series.record(start + i).iter().enumerate() {
                    data[ch * d + i] = v;
                }
            }
            let label =
                majority_label(&series.labels()[start..start + d]).expect("window is non-empty");
            Window::from_flat(k, d, data, label)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Segmentation {
        windows,
        too_short: false,
    })
}
