//! End-to-end experiment stages.
//!
//! Each stage takes the artifacts of the previous one, so the CLI can run
//! them separately (persisting artifacts in between) or all at once.

use std::fs;
use std::path::Path;

use crate::archive::PreparedWindows;
use crate::attack::{cross_user_eval, four_way_eval, train_gan, AttackReport, Gan};
use crate::config::{CrossUser, CsvSource, DataSource, ExperimentConfig};
use crate::data::{
    decimate, downsample_class, gen_synthetic, interpolate_missing, load_csv, partition_windows,
    segment_windows, split_train_test, Category, InferencePartition, NormStats, RawSeries, Window,
};
use crate::eval::{evaluate_pipeline, train_classifier, Classifier, EvalReport};
use crate::rae::{
    build_rae_topology, build_replacement_pairs, train_rae, TrainedRae, WindowTransform,
};
use crate::{seed, Error, Result};

pub const PREPARED_FILE: &str = "prepared.bin";
pub const MODEL_FILE: &str = "rae.model";
pub const CLASSIFIER_FILE: &str = "classifier.bin";
pub const F1_CSV: &str = "eval_f1.csv";
pub const CONFUSION_CSV: &str = "eval_confusion.csv";
pub const EVAL_TEXT: &str = "eval.txt";
pub const ATTACK_SAME_CSV: &str = "attack_same_user.csv";
pub const ATTACK_CROSS_CSV: &str = "attack_cross_user.csv";

fn load_csv_source(src: &CsvSource) -> Result<RawSeries> {
    let series = load_csv(&src.path, src.channels)?;
    match src.decimate {
        Some(n) if n > 1 => decimate(&series, n),
        _ => Ok(series),
    }
}

/// Loads (or generates) the configured series together with its partition.
pub fn load_series(cfg: &ExperimentConfig) -> Result<(RawSeries, InferencePartition)> {
    let partition = cfg.effective_partition()?;
    let series = match &cfg.data {
        DataSource::Synthetic(s) => gen_synthetic(s)?.series,
        DataSource::Csv(c) => load_csv_source(c)?,
    };
    Ok((series, partition))
}

fn windows_of(series: &RawSeries, d: usize, w: usize) -> Result<Vec<Window>> {
    let seg = segment_windows(&interpolate_missing(series)?, d, w)?;
    if seg.too_short {
        return Err(Error::Data(format!(
            "series of {} records is shorter than one window ({d})",
            series.len()
        )));
    }
    Ok(seg.windows)
}

/// Interpolates, windows, subsamples, splits and normalizes a series.
///
/// Normalization statistics come from the training windows only and are
/// applied to both splits. Values are rounded to `f32`, the storage precision
/// of every artifact, so in-memory and reloaded runs agree exactly.
pub fn prepare_series(
    cfg: &ExperimentConfig,
    series: &RawSeries,
    partition: InferencePartition,
) -> Result<PreparedWindows> {
    let (d, w) = (cfg.window.length, cfg.window.step);
    if series.channels() != cfg.channels() {
        return Err(Error::shape(format!(
            "series has {} channels, config says {}",
            series.channels(),
            cfg.channels()
        )));
    }
    let mut windows = windows_of(series, d, w)?;
    partition.check_covers(windows.iter().map(|w| w.label))?;
    if let Some(ds) = &cfg.downsample {
        windows = downsample_class(&windows, ds.class, ds.keep_fraction, cfg.seeds.downsample)?;
    }
    let (train, test) = split_train_test(&windows, cfg.train_fraction, cfg.seeds.split)?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::Data(format!(
            "{} windows are too few for a train/test split",
            windows.len()
        )));
    }
    let norm = NormStats::fit_windows(&train)?;
    let mut prepared = PreparedWindows {
        channels: series.channels(),
        window_len: d,
        step: w,
        train: norm.apply_windows(&train)?,
        test: norm.apply_windows(&test)?,
        norm,
        partition,
    };
    prepared.round_to_f32();
    Ok(prepared)
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<PreparedWindows> {
    let (series, partition) = load_series(cfg)?;
    prepare_series(cfg, &series, partition)
}

/// Builds replacement pairs from the training windows and fits the RAE.
pub fn train_rae_stage(cfg: &ExperimentConfig, prepared: &PreparedWindows) -> Result<TrainedRae> {
    let parts = partition_windows(&prepared.train, &prepared.partition)?;
    let pairs = build_replacement_pairs(&parts.white, &parts.black, &parts.gray, cfg.seeds.pairs)?;
    let topology = build_rae_topology(prepared.channels, prepared.window_len, cfg.rae.profile)?;
    train_rae(
        &pairs,
        &topology,
        &cfg.rae.train,
        prepared.norm.clone(),
        prepared.partition.clone(),
    )
}

pub fn train_classifier_stage(
    cfg: &ExperimentConfig,
    prepared: &PreparedWindows,
) -> Result<Classifier> {
    train_classifier(&prepared.train, &cfg.classifier)
}

/// OF1/TF1 and category confusion on the test split.
pub fn evaluate_stage(
    clf: &Classifier,
    transform: &dyn WindowTransform,
    prepared: &PreparedWindows,
) -> Result<EvalReport> {
    evaluate_pipeline(clf, transform, &prepared.test, &prepared.partition)
}

/// Attack results against one user's released data.
#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub same_user: AttackReport,
    pub cross_user: Option<AttackReport>,
}

/// Released windows the adversary observes: RAE outputs on the test gray
/// windows ("real gray") and on the test black windows ("fake gray").
pub fn released_gray(
    rae: &TrainedRae,
    prepared: &PreparedWindows,
) -> Result<(Vec<Window>, Vec<Window>)> {
    let parts = partition_windows(&prepared.test, &prepared.partition)?;
    Ok((
        rae.transform_batch(&parts.gray)?,
        rae.transform_batch(&parts.black)?,
    ))
}

/// Original gray windows of another user, normalized with this model's
/// statistics so both users live on the same scale.
pub fn cross_user_gray(
    cfg: &ExperimentConfig,
    cross: &CrossUser,
    norm: &NormStats,
    partition: &InferencePartition,
) -> Result<Vec<Window>> {
    let series = match (cross, &cfg.data) {
        (CrossUser::SyntheticUser(user), DataSource::Synthetic(s)) => {
            let mut other = s.clone();
            other.user = *user;
            gen_synthetic(&other)?.series
        }
        (CrossUser::SyntheticUser(_), DataSource::Csv(_)) => {
            return Err(Error::config(
                "synthetic cross-user data requires synthetic data",
            ))
        }
        (CrossUser::Csv(src), _) => load_csv_source(src)?,
    };
    let windows = windows_of(&series, cfg.window.length, cfg.window.step)?;
    let gray: Vec<Window> = windows
        .into_iter()
        .filter(|w| partition.category(w.label) == Some(Category::Gray))
        .collect();
    let mut gray = norm.apply_windows(&gray)?;
    for w in &mut gray {
        for v in w.values_mut().data_mut() {
            *v = *v as f32 as f64;
        }
    }
    Ok(gray)
}

fn snapshot_rows(
    gan: &Gan,
    real: &[Window],
    fake: &[Window],
    generated: Option<(usize, u64)>,
) -> Result<AttackReport> {
    let mut rows = Vec::with_capacity(gan.snapshots.len());
    for snap in &gan.snapshots {
        rows.push(match generated {
            Some((n, s)) => {
                let mut rng = seed::rng(seed::derive(s, snap.epoch as u64));
                four_way_eval(snap, real, fake, n, &mut rng)?
            }
            None => cross_user_eval(snap, real, fake)?,
        });
    }
    Ok(AttackReport { rows })
}

/// Same-user attack: a GAN trained on the original training gray windows.
/// Cross-user attack (when configured): a GAN trained on another user's gray
/// windows, scored on this user's released data.
pub fn attack_stage(
    cfg: &ExperimentConfig,
    prepared: &PreparedWindows,
    rae: &TrainedRae,
) -> Result<AttackOutcome> {
    let gan_cfg = &cfg.attack.gan;
    let (real, fake) = released_gray(rae, prepared)?;
    let train_gray = partition_windows(&prepared.train, &prepared.partition)?.gray;
    let gan = train_gan(&train_gray, gan_cfg)?;
    let eval_seed = seed::derive(gan_cfg.seed, 0xE7A1);
    let same_user = snapshot_rows(&gan, &real, &fake, Some((gan_cfg.n_generated, eval_seed)))?;

    let cross_user = match &cfg.attack.cross_user {
        None => None,
        Some(cross) => {
            let other = cross_user_gray(cfg, cross, rae.norm(), &prepared.partition)?;
            let gan = train_gan(&other, gan_cfg)?;
            Some(snapshot_rows(&gan, &real, &fake, None)?)
        }
    };
    Ok(AttackOutcome {
        same_user,
        cross_user,
    })
}

/// Writes the evaluation CSVs and text summary into `dir`.
pub fn write_eval_reports(dir: &Path, report: &EvalReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(F1_CSV), report.f1_csv())?;
    fs::write(dir.join(CONFUSION_CSV), report.confusion_csv())?;
    fs::write(dir.join(EVAL_TEXT), report.to_text())?;
    Ok(())
}

pub fn write_attack_reports(dir: &Path, outcome: &AttackOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(ATTACK_SAME_CSV), outcome.same_user.to_csv())?;
    if let Some(cross) = &outcome.cross_user {
        fs::write(dir.join(ATTACK_CROSS_CSV), cross.to_csv())?;
    }
    Ok(())
}
