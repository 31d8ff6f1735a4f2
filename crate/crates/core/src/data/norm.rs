use serde::{Deserialize, Serialize};

use super::{RawSeries, Window};
use crate::{Error, Result};

/// Per-channel mean and population standard deviation.
///
/// A channel with zero variance gets `std = 1` and its `zero_variance` flag set,
/// so standardising it yields zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    #[serde(default)]
    pub zero_variance: Vec<bool>,
}

impl NormStats {
    pub fn channels(&self) -> usize {
        self.mean.len()
    }

    /// Mean 0 and std 1 on every channel.
    pub fn identity(channels: usize) -> Self {
        Self {
            mean: vec![0.0; channels],
            std: vec![1.0; channels],
            zero_variance: vec![false; channels],
        }
    }

    pub fn any_zero_variance(&self) -> bool {
        self.zero_variance.iter().any(|&z| z)
    }

    fn from_moments(sum: &[f64], count: usize, sq_dev: impl Fn(usize, f64) -> f64) -> Self {
        let n = count as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let mut std = Vec::with_capacity(mean.len());
        let mut zero_variance = Vec::with_capacity(mean.len());
        for (ch, &m) in mean.iter().enumerate() {
            let var = sq_dev(ch, m) / n;
            let s = var.sqrt();
            if s > 0.0 && s.is_finite() {
                std.push(s);
                zero_variance.push(false);
            } else {
                std.push(1.0);
                zero_variance.push(true);
            }
        }
        Self {
            mean,
            std,
            zero_variance,
        }
    }

    /// Fits over every sample of every window.
    pub fn fit_windows(windows: &[Window]) -> Result<Self> {
        let first = windows
            .first()
            .ok_or_else(|| Error::Data("cannot fit normalizer on zero windows".into()))?;
        let (k, d) = first.shape();
        let mut sum = vec![0.0; k];
        for w in windows {
            if w.shape() != (k, d) {
                return Err(Error::shape("windows differ in shape"));
            }
            for (ch, s) in sum.iter_mut().enumerate() {
                *s += w.channel(ch).iter().sum::<f64>();
            }
        }
        let count = windows.len() * d;
        Ok(Self::from_moments(&sum, count, |ch, m| {
            windows
                .iter()
                .flat_map(|w| w.channel(ch).iter())
                .map(|v| (v - m) * (v - m))
                .sum()
        }))
    }

    pub fn apply(&self, series: &RawSeries) -> Result<RawSeries> {
        self.check_channels(series.channels())?;
        let mut out = series.clone();
        let k = series.channels();
        for (i, v) in out.values_mut().iter_mut().enumerate() {
            let ch = i % k;
            *v = (*v - self.mean[ch]) / self.std[ch];
        }
        Ok(out)
    }

    /// Standardises a flattened channels-first `k × d` buffer in place.
    pub fn normalize_flat(&self, values: &mut [f64]) -> Result<()> {
        let k = self.channels();
        if k == 0 || !values.len().is_multiple_of(k) {
            return Err(Error::shape(format!(
                "{} values do not split into {k} channels",
                values.len()
            )));
        }
        let d = values.len() / k;
        for (ch, row) in values.chunks_mut(d).enumerate() {
            let (m, s) = (self.mean[ch], self.std[ch]);
            row.iter_mut().for_each(|v| *v = (*v - m) / s);
        }
        Ok(())
    }

    /// Inverse of [`NormStats::normalize_flat`].
    pub fn denormalize_flat(&self, values: &mut [f64]) -> Result<()> {
        let k = self.channels();
        if k == 0 || !values.len().is_multiple_of(k) {
            return Err(Error::shape(format!(
                "{} values do not split into {k} channels",
                values.len()
            )));
        }
        let d = values.len() / k;
        for (ch, row) in values.chunks_mut(d).enumerate() {
            let (m, s) = (self.mean[ch], self.std[ch]);
            row.iter_mut().for_each(|v| *v = *v * s + m);
        }
        Ok(())
    }

    pub fn apply_window(&self, window: &Window) -> Result<Window> {
        self.check_channels(window.channels())?;
        let mut out = window.clone();
        self.normalize_flat(out.values_mut().data_mut())?;
        Ok(out)
    }

    pub fn apply_windows(&self, windows: &[Window]) -> Result<Vec<Window>> {
        windows.iter().map(|w| self.apply_window(w)).collect()
    }

    fn check_channels(&self, k: usize) -> Result<()> {
        if k != self.channels() {
            return Err(Error::shape(format!(
                "normalizer has {} channels, data has {k}",
                self.channels()
            )));
        }
        Ok(())
    }
}

/// Fits per-channel statistics over a gap-free series.
pub fn fit_normalizer(series: &RawSeries) -> Result<NormStats> {
    if series.is_empty() {
        return Err(Error::Data(
            "cannot fit normalizer on an empty series".into(),
        ));
    }
    if series.has_missing() {
        return Err(Error::Data(
            "series still has missing values; interpolate first".into(),
        ));
    }
    let k = series.channels();
    let mut sum = vec![0.0; k];
    for t in 0..series.len() {
        for (s, v) in sum.iter_mut().zip(series.record(t)) {
            *s += v;
        }
    }
    Ok(NormStats::from_moments(&sum, series.len(), |ch, m| {
        (0..series.len())
            .map(|t| {
                let v = series.value(t, ch);
                (v - m) * (v - m)
            })
            .sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(vals: &[f64]) -> RawSeries {
        RawSeries::new(1, vals.to_vec(), vec![0; vals.len()]).unwrap()
    }

    #[test]
    fn hand_computed_channel() {
        let s = single(&[1.0, 2.0, 3.0]);
        let stats = fit_normalizer(&s).unwrap();
        assert_eq!(stats.mean, vec![2.0]);
        assert!((stats.std[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((stats.std[0] - 0.8165).abs() < 1e-4);
        let n = stats.apply(&s).unwrap();
        let expected = [-1.2247, 0.0, 1.2247];
        for (v, e) in n.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-4);
        }
    }

    #[test]
    fn constant_channel_flags_zero_variance() {
        let s = single(&[5.0, 5.0]);
        let stats = fit_normalizer(&s).unwrap();
        assert!(stats.zero_variance[0]);
        assert_eq!(stats.std[0], 1.0);
        assert_eq!(stats.apply(&s).unwrap().values(), &[0.0, 0.0]);
    }

    #[test]
    fn refit_after_apply_is_standard() {
        let s = RawSeries::new(
            2,
            vec![1.0, -3.0, 4.0, 8.0, 2.5, 0.0, -7.0, 1.0, 3.0, 3.0],
            vec![0; 5],
        )
        .unwrap();
        let stats = fit_normalizer(&s).unwrap();
        let again = fit_normalizer(&stats.apply(&s).unwrap()).unwrap();
        for ch in 0..2 {
            assert!(again.mean[ch].abs() < 1e-9);
            assert!((again.std[ch] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_values_rejected() {
        assert!(fit_normalizer(&single(&[1.0, f64::NAN])).is_err());
    }

    #[test]
    fn flat_round_trip() {
        let stats = NormStats {
            mean: vec![1.0, -2.0],
            std: vec![2.0, 0.5],
            zero_variance: vec![false, false],
        };
        let orig = vec![3.0, 5.0, 1.0, -2.0, -1.0, 0.0];
        let mut v = orig.clone();
        stats.normalize_flat(&mut v).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 0.0, 0.0, 2.0, 4.0]);
        stats.denormalize_flat(&mut v).unwrap();
        assert_eq!(v, orig);
        assert!(stats.normalize_flat(&mut [0.0; 3]).is_err());
    }
}
