//! Synthetic benchmark with white/gray/black structure.
//!
//! Every class emits its own waveform family: a per-channel offset plus a
//! two-tone sinusoid mixture under a slow envelope, plus Gaussian noise. Gray
//! classes are slow, wide swings; white and black classes are faster with
//! distinct frequencies. Class offsets sit on distinct levels, so per-class
//! means differ by construction.
//!
//! `seed` fixes the activity families (the population). `user` perturbs them
//! the way a different person performing the same activities would, and
//! rotates channel pairs as if the device were worn at another angle; user 0
//! is the unperturbed population.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{InferencePartition, RawSeries};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub white_classes: usize,
    pub black_classes: usize,
    pub gray_classes: usize,
    pub channels: usize,
    pub windows_per_class: usize,
    /// Window length `d` and step `w` used to size each class block so it
    /// yields exactly `windows_per_class` windows.
    pub window_len: usize,
    pub step: usize,
    pub seed: u64,
    pub user: u32,
    /// Scale of the per-user perturbation.
    pub user_variation: f64,
    /// Standard deviation of additive noise.
    pub noise: f64,
    pub sample_rate: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            white_classes: 3,
            black_classes: 2,
            gray_classes: 1,
            channels: 6,
            windows_per_class: 1000,
            window_len: 30,
            step: 3,
            seed: 7,
            user: 0,
            user_variation: 1.0,
            noise: 0.15,
            sample_rate: 30.0,
        }
    }
}

impl SyntheticConfig {
    pub fn num_classes(&self) -> usize {
        self.white_classes + self.black_classes + self.gray_classes
    }

    /// Records per class block: `(n - 1)·w + d`.
    pub fn block_len(&self) -> usize {
        (self.windows_per_class.saturating_sub(1)) * self.step + self.window_len
    }

    /// Gray ids first, then white, then black.
    pub fn partition(&self) -> InferencePartition {
        let g = self.gray_classes as u32;
        let w = self.white_classes as u32;
        let b = self.black_classes as u32;
        InferencePartition {
            gray: (0..g).collect(),
            white: (g..g + w).collect(),
            black: (g + w..g + w + b).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.white_classes == 0 || self.black_classes == 0 || self.gray_classes == 0 {
            return Err(Error::config(
                "synthetic data needs at least one class per list",
            ));
        }
        if self.channels == 0 || self.windows_per_class == 0 {
            return Err(Error::config(
                "channels and windows per class must be positive",
            ));
        }
        if self.window_len == 0 || self.step == 0 {
            return Err(Error::config("window length and step must be positive"));
        }
        if !(self.noise >= 0.0 && self.user_variation >= 0.0) {
            return Err(Error::config(
                "noise and user variation must be non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub series: RawSeries,
    pub partition: InferencePartition,
}

#[derive(Debug, Clone)]
struct ClassWave {
    offset: Vec<f64>,
    amp: Vec<f64>,
    phase: Vec<f64>,
    phase2: Vec<f64>,
    freq: f64,
    freq2: f64,
    env_period: f64,
    env_phase: f64,
}

impl ClassWave {
    fn sample(&self, t: f64, ch: usize) -> f64 {
        let env = 1.0 + 0.25 * (TAU * t / self.env_period + self.env_phase).sin();
        let a = self.amp[ch] * env;
        self.offset[ch]
            + a * (TAU * self.freq * t + self.phase[ch]).sin()
            + 0.5 * a * (TAU * self.freq2 * t + self.phase2[ch]).sin()
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn population(cfg: &SyntheticConfig) -> Vec<ClassWave> {
    let k = cfg.channels;
    let n = cfg.num_classes();
    let mut rng = seed::rng(seed::derive(cfg.seed, 1));
    let direction: Vec<f64> = (0..k)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let spacing = 0.8;
    // Gray levels sit beyond the active ones with an extra gap, so even the
    // wide gray swings stay clear of active classes.
    let gray_gap = 2.0;
    let active = (n - cfg.gray_classes) as f64;
    let partition = cfg.partition();
    (0..n)
        .map(|c| {
            let gray = partition.gray.contains(&(c as u32));
            let level = if gray {
                -spacing * ((active + 1.0) / 2.0 + c as f64) - gray_gap
            } else {
                spacing * ((c - cfg.gray_classes) as f64 - (active - 1.0) / 2.0)
            };
            let offset = direction
                .iter()
                .map(|d| level * d + rng.random_range(-0.25..0.25))
                .collect();
            let (amp_base, freq) = if gray {
                (4.0, 0.015 + 0.004 * c as f64)
            } else {
                let j = (c - cfg.gray_classes) as f64;
                (
                    1.0 + 0.15 * j,
                    0.05 + 0.03 * j + rng.random_range(0.0..0.005),
                )
            };
            let amp = (0..k)
                .map(|_| amp_base * rng.random_range(0.8..1.2))
                .collect();
            let phase = (0..k).map(|_| rng.random_range(0.0..TAU)).collect();
            let phase2 = (0..k).map(|_| rng.random_range(0.0..TAU)).collect();
            ClassWave {
                offset,
                amp,
                phase,
                phase2,
                freq,
                freq2: freq * rng.random_range(2.1..2.9),
                env_period: rng.random_range(80.0..160.0),
                env_phase: rng.random_range(0.0..TAU),
            }
        })
        .collect()
}

/// How a user differs from the population: perturbed waveforms and a
/// device orientation, one rotation angle per channel pair.
struct UserProfile {
    waves: Vec<ClassWave>,
    rotation: Vec<(f64, f64)>,
}

fn personalise(mut waves: Vec<ClassWave>, cfg: &SyntheticConfig) -> UserProfile {
    let pairs = cfg.channels / 2;
    if cfg.user == 0 || cfg.user_variation == 0.0 {
        return UserProfile {
            waves,
            rotation: vec![(1.0, 0.0); pairs],
        };
    }
    let v = cfg.user_variation;
    let mut rng = seed::rng(seed::derive(cfg.seed, 1_000 + u64::from(cfg.user)));
    for w in &mut waves {
        for o in &mut w.offset {
            *o += 0.4 * v * normal(&mut rng);
        }
        for a in &mut w.amp {
            *a *= (1.0 + 0.3 * v * normal(&mut rng)).clamp(0.3, 3.0);
        }
        for p in w.phase.iter_mut().chain(w.phase2.iter_mut()) {
            *p += v * normal(&mut rng);
        }
        w.freq *= (1.0 + 0.15 * v * normal(&mut rng)).clamp(0.5, 2.0);
        w.freq2 *= (1.0 + 0.15 * v * normal(&mut rng)).clamp(0.5, 2.0);
    }
    // The device sits differently on every wearer, which rotates each
    // channel pair as a whole.
    let rotation = (0..pairs)
        .map(|_| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let angle = sign * v.min(1.0) * rng.random_range(0.5..1.0) * std::f64::consts::PI;
            (angle.cos(), angle.sin())
        })
        .collect();
    UserProfile { waves, rotation }
}

/// Generates one contiguous block per class, in class-id order.
pub fn gen_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticData> {
    cfg.validate()?;
    let user = personalise(population(cfg), cfg);
    let k = cfg.channels;
    let block = cfg.block_len();
    let mut noise_rng = seed::rng(seed::derive(cfg.seed, 2_000 + u64::from(cfg.user)));
    let mut series = RawSeries::empty(k);
    series.sample_rate = Some(cfg.sample_rate);
    let mut record = vec![0.0; k];
    for (c, wave) in user.waves.iter().enumerate() {
        for t in 0..block {
            for (ch, slot) in record.iter_mut().enumerate() {
                *slot = wave.sample(t as f64, ch);
            }
            for (p, &(cos, sin)) in user.rotation.iter().enumerate() {
                let (x, y) = (record[2 * p], record[2 * p + 1]);
                record[2 * p] = cos * x - sin * y;
                record[2 * p + 1] = sin * x + cos * y;
            }
            for slot in record.iter_mut() {
                *slot += cfg.noise * normal(&mut noise_rng);
            }
            series.push(c as u32, &record);
        }
    }
    Ok(SyntheticData {
        series,
        partition: cfg.partition(),
    })
}
