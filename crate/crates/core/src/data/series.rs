use crate::{Error, Result};

/// Multichannel record stream. Missing readings are stored as `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    channels: usize,
    /// Row-major `len × channels`.
    values: Vec<f64>,
    labels: Vec<u32>,
    /// Metadata only.
    pub sample_rate: Option<f64>,
}

impl RawSeries {
    pub fn new(channels: usize, values: Vec<f64>, labels: Vec<u32>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::Data("a series needs at least one channel".into()));
        }
        if values.len() != labels.len() * channels {
            return Err(Error::shape(format!(
                "{} values for {} records of {channels} channels",
                values.len(),
                labels.len()
            )));
        }
        Ok(Self {
            channels,
            values,
            labels,
            sample_rate: None,
        })
    }

    pub fn empty(channels: usize) -> Self {
        Self {
            channels,
            values: Vec::new(),
            labels: Vec::new(),
            sample_rate: None,
        }
    }

    pub fn push(&mut self, label: u32, record: &[f64]) {
        assert_eq!(record.len(), self.channels, "record arity");
        self.labels.push(label);
        self.values.extend_from_slice(record);
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn value(&self, t: usize, ch: usize) -> f64 {
        self.values[t * self.channels + ch]
    }

    pub fn record(&self, t: usize) -> &[f64] {
        &self.values[t * self.channels..(t + 1) * self.channels]
    }

    pub fn is_missing(&self, t: usize, ch: usize) -> bool {
        self.value(t, ch).is_nan()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }

    /// Copies one channel out as a column.
    pub fn channel(&self, ch: usize) -> Vec<f64> {
        (0..self.len()).map(|t| self.value(t, ch)).collect()
    }

    pub fn concat(mut self, other: &RawSeries) -> Result<Self> {
        if other.channels != self.channels {
            return Err(Error::shape(
                "cannot concatenate series with different channel counts",
            ));
        }
        self.values.extend_from_slice(&other.values);
        self.labels.extend_from_slice(&other.labels);
        Ok(self)
    }
}

/// Keeps every `n`-th record, starting with the first.
pub fn decimate(series: &RawSeries, n: usize) -> Result<RawSeries> {
    if n == 0 {
        return Err(Error::config("decimation factor must be at least 1"));
    }
    let mut out = RawSeries::empty(series.channels());
    out.sample_rate = series.sample_rate.map(|r| r / n as f64);
    for t in (0..series.len()).step_by(n) {
        out.push(series.labels()[t], series.record(t));
    }
    Ok(out)
}
