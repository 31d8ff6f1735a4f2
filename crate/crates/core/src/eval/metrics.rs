use std::collections::BTreeSet;

use serde::Serialize;

use crate::data::{Category, InferencePartition};
use crate::{Error, Result};

/// One-vs-rest counts for a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassScore {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ClassScore {
    /// Number of true instances.
    pub fn support(&self) -> usize {
        self.tp + self.fn_
    }

    /// `2PR / (P + R)`, or 0 when `P + R = 0`.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if self.tp == 0 || denom == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

fn check_lengths(predictions: &[u32], truths: &[u32]) -> Result<()> {
    if predictions.len() != truths.len() {
        return Err(Error::shape(format!(
            "{} predictions for {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    Ok(())
}

pub fn class_scores(predictions: &[u32], truths: &[u32], class: u32) -> Result<ClassScore> {
    check_lengths(predictions, truths)?;
    let mut s = ClassScore::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        match (p == class, t == class) {
            (true, true) => s.tp += 1,
            (true, false) => s.fp += 1,
            (false, true) => s.fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(s)
}

/// Macro-averaged F1 per inference list. Classes without support in
/// `truths` are left out; a list with no supported class is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ListF1 {
    pub white: Option<f64>,
    pub black: Option<f64>,
    pub gray: Option<f64>,
}

impl ListF1 {
    pub fn get(&self, cat: Category) -> Option<f64> {
        match cat {
            Category::White => self.white,
            Category::Black => self.black,
            Category::Gray => self.gray,
        }
    }

    fn set(&mut self, cat: Category, v: Option<f64>) {
        match cat {
            Category::White => self.white = v,
            Category::Black => self.black = v,
            Category::Gray => self.gray = v,
        }
    }
}

pub fn f1_per_list(
    predictions: &[u32],
    truths: &[u32],
    partition: &InferencePartition,
) -> Result<ListF1> {
    check_lengths(predictions, truths)?;
    let present: BTreeSet<u32> = truths.iter().copied().collect();
    let mut out = ListF1::default();
    for cat in Category::ALL {
        let mut scores = Vec::new();
        for &class in partition.classes(cat) {
            if present.contains(&class) {
                scores.push(class_scores(predictions, truths, class)?.f1());
            }
        }
        let value = (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64);
        out.set(cat, value);
    }
    Ok(out)
}

/// Counts indexed `[true category][predicted category]` in W, B, G order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CategoryConfusion(pub [[usize; 3]; 3]);

impl CategoryConfusion {
    pub fn get(&self, truth: Category, predicted: Category) -> usize {
        self.0[truth.index()][predicted.index()]
    }

    pub fn row_total(&self, truth: Category) -> usize {
        self.0[truth.index()].iter().sum()
    }

    pub fn total(&self) -> usize {
        self.0.iter().flatten().sum()
    }

    /// Share of `truth` windows predicted as `predicted`; `None` without support.
    pub fn row_fraction(&self, truth: Category, predicted: Category) -> Option<f64> {
        let n = self.row_total(truth);
        (n > 0).then(|| self.get(truth, predicted) as f64 / n as f64)
    }
}

pub fn category_confusion(
    predictions: &[u32],
    truths: &[u32],
    partition: &InferencePartition,
) -> Result<CategoryConfusion> {
    check_lengths(predictions, truths)?;
    let mut m = CategoryConfusion::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        let tc = partition.require_category(t)?;
        let pc = partition.require_category(p)?;
        m.0[tc.index()][pc.index()] += 1;
    }
    Ok(m)
}
