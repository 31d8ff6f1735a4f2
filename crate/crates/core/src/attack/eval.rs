use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use super::Snapshot;
use crate::data::Window;
use crate::{Error, Result};

/// Discriminator accuracy at one snapshot. `generated` and `top10_generated`
/// are absent for cross-user rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackRow {
    pub epoch: usize,
    /// Real gray windows scored as real.
    pub real_gray: f64,
    /// Replaced black windows scored as fake.
    pub fake_gray: f64,
    pub generated: Option<f64>,
    pub top10_generated: Option<f64>,
}

impl AttackRow {
    /// Most real windows are rejected together with most fakes, so a "fake"
    /// verdict carries no information.
    pub fn non_informative(&self) -> bool {
        self.real_gray < 0.5 && self.fake_gray > 0.5
    }
}

/// Fraction of scores above 0.5.
pub fn real_accuracy(scores: &[f64]) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.iter().filter(|&&s| s > 0.5).count() as f64 / scores.len() as f64
}

/// Fraction of scores at or below 0.5.
pub fn reject_accuracy(scores: &[f64]) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    scores.iter().filter(|&&s| s <= 0.5).count() as f64 / scores.len() as f64
}

fn nonempty(windows: &[Window], what: &str) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::Data(format!("no {what} windows to evaluate")));
    }
    Ok(())
}

/// Scores real gray windows, replaced black windows, `n_generated` fresh
/// generator samples, and the highest-scored tenth of those samples.
pub fn four_way_eval<R: Rng + ?Sized>(
    snapshot: &Snapshot,
    real_gray: &[Window],
    fake_gray: &[Window],
    n_generated: usize,
    rng: &mut R,
) -> Result<AttackRow> {
    nonempty(real_gray, "real gray")?;
    nonempty(fake_gray, "fake gray")?;
    if n_generated == 0 {
        return Err(Error::Data("no generated windows to evaluate".into()));
    }
    let generated = snapshot.generate(n_generated, real_gray[0].shape(), rng)?;
    let mut gen_scores = snapshot.score(&generated)?;
    gen_scores.sort_by(|a, b| b.total_cmp(a));
    let top = n_generated.div_ceil(10);
    Ok(AttackRow {
        epoch: snapshot.epoch,
        real_gray: real_accuracy(&snapshot.score(real_gray)?),
        fake_gray: reject_accuracy(&snapshot.score(fake_gray)?),
        generated: Some(reject_accuracy(&gen_scores)),
        top10_generated: Some(reject_accuracy(&gen_scores[..top])),
    })
}

/// Applies a discriminator trained on another user's gray data to this
/// user's real and replaced windows.
pub fn cross_user_eval(
    snapshot: &Snapshot,
    real_gray: &[Window],
    fake_gray: &[Window],
) -> Result<AttackRow> {
    nonempty(real_gray, "real gray")?;
    nonempty(fake_gray, "fake gray")?;
    Ok(AttackRow {
        epoch: snapshot.epoch,
        real_gray: real_accuracy(&snapshot.score(real_gray)?),
        fake_gray: reject_accuracy(&snapshot.score(fake_gray)?),
        generated: None,
        top10_generated: None,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AttackReport {
    pub rows: Vec<AttackRow>,
}

impl AttackReport {
    pub fn last(&self) -> Option<&AttackRow> {
        self.rows.last()
    }

    /// `epoch,real_gray,fake_gray,generated,top10_generated`; absent values are empty.
    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let mut s = String::from("epoch,real_gray,fake_gray,generated,top10_generated\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.6},{:.6},{},{}",
                r.epoch,
                r.real_gray,
                r.fake_gray,
                f(r.generated),
                f(r.top10_generated)
            );
        }
        s
    }
}
