//! Experiment configuration.
//!
//! A JSON document; every section has defaults, so `{}` is a complete
//! synthetic-benchmark experiment. Relative CSV paths resolve against the
//! directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attack::GanConfig;
use crate::data::{InferencePartition, SyntheticConfig};
use crate::eval::ClassifierConfig;
use crate::rae::{Profile, RaeTrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Synthetic(SyntheticConfig),
    Csv(CsvSource),
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic(SyntheticConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    pub path: PathBuf,
    pub channels: usize,
    /// Keep every n-th record (e.g. 3 to bring 98 Hz near 30 Hz).
    #[serde(default)]
    pub decimate: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub length: usize,
    pub step: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            length: 30,
            step: 3,
        }
    }
}

/// Random subsampling of one over-represented class (typically "null").
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Downsample {
    pub class: u32,
    pub keep_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub split: u64,
    pub downsample: u64,
    pub pairs: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            split: 11,
            downsample: 12,
            pairs: 13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaeSection {
    pub profile: Profile,
    #[serde(flatten)]
    pub train: RaeTrainConfig,
}

impl Default for RaeSection {
    fn default() -> Self {
        Self {
            profile: Profile::Deep,
            train: RaeTrainConfig::default(),
        }
    }
}

/// Where the cross-user adversary's gray data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossUser {
    /// The synthetic generator with the same settings but another user index.
    SyntheticUser(u32),
    Csv(CsvSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackSection {
    #[serde(flatten)]
    pub gan: GanConfig,
    pub cross_user: Option<CrossUser>,
}

impl Default for AttackSection {
    fn default() -> Self {
        Self {
            gan: GanConfig::default(),
            cross_user: Some(CrossUser::SyntheticUser(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub data: DataSource,
    pub window: WindowConfig,
    /// Required for CSV data; synthetic data supplies its own.
    pub partition: Option<InferencePartition>,
    pub downsample: Option<Downsample>,
    pub train_fraction: f64,
    pub seeds: Seeds,
    pub rae: RaeSection,
    pub classifier: ClassifierConfig,
    pub attack: AttackSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            data: DataSource::default(),
            window: WindowConfig::default(),
            partition: None,
            downsample: None,
            train_fraction: 0.8,
            seeds: Seeds::default(),
            rae: RaeSection::default(),
            classifier: ClassifierConfig::default(),
            attack: AttackSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DataSource::Csv(c) = &mut self.data {
            fix(&mut c.path);
        }
        if let Some(CrossUser::Csv(c)) = &mut self.attack.cross_user {
            fix(&mut c.path);
        }
    }

    /// Channel count of the configured data.
    pub fn channels(&self) -> usize {
        match &self.data {
            DataSource::Synthetic(s) => s.channels,
            DataSource::Csv(c) => c.channels,
        }
    }

    /// The configured partition, or the synthetic generator's own.
    pub fn effective_partition(&self) -> Result<InferencePartition> {
        match (&self.partition, &self.data) {
            (Some(p), _) => Ok(p.clone()),
            (None, DataSource::Synthetic(s)) => Ok(s.partition()),
            (None, DataSource::Csv(_)) => Err(Error::config(
                "CSV data needs an explicit partition (white/black/gray class lists)",
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.length == 0 || self.window.step == 0 {
            return Err(Error::config("window length and step must be positive"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::config("train_fraction must be in (0, 1)"));
        }
        if let Some(d) = &self.downsample {
            if !(d.keep_fraction > 0.0 && d.keep_fraction <= 1.0) {
                return Err(Error::config("downsample.keep_fraction must be in (0, 1]"));
            }
        }
        match &self.data {
            DataSource::Synthetic(s) => {
                s.validate()?;
                if (s.window_len, s.step) != (self.window.length, self.window.step) {
                    return Err(Error::config(
                        "synthetic window_len/step must match the window section",
                    ));
                }
            }
            DataSource::Csv(c) => {
                if c.channels == 0 {
                    return Err(Error::config("csv.channels must be positive"));
                }
                if c.decimate == Some(0) {
                    return Err(Error::config("csv.decimate must be at least 1"));
                }
            }
        }
        let p = self.effective_partition()?;
        p.validate()?;
        if p.white.is_empty() && p.black.is_empty() && p.gray.is_empty() {
            return Err(Error::config("partition lists are all empty"));
        }
        if let Some(CrossUser::SyntheticUser(_)) = self.attack.cross_user {
            if !matches!(self.data, DataSource::Synthetic(_)) {
                return Err(Error::config(
                    "attack.cross_user.synthetic_user requires synthetic data",
                ));
            }
        }
        for (name, fit) in [
            ("rae", &self.rae.train.fit),
            ("classifier", &self.classifier.fit),
        ] {
            if fit.epochs == 0 || fit.batch_size == 0 || !(fit.learning_rate > 0.0) {
                return Err(Error::config(format!(
                    "{name}: epochs, batch_size and learning_rate must be positive"
                )));
            }
        }
        self.attack.gan.validate()?;
        crate::rae::build_rae_topology(self.channels(), self.window.length, self.rae.profile)?;
        Ok(())
    }
}
