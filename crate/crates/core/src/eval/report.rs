use std::fmt::Write as _;

use serde::Serialize;

use super::{category_confusion, f1_per_list, CategoryConfusion, Classifier, ListF1};
use crate::data::{Category, InferencePartition, Window};
use crate::rae::WindowTransform;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub f1: ListF1,
    pub confusion: CategoryConfusion,
}

/// Classifier performance on original (OF1) and transformed (TF1) windows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub original: ConditionReport,
    pub transformed: ConditionReport,
    pub windows: usize,
}

fn condition(
    clf: &Classifier,
    windows: &[Window],
    truths: &[u32],
    partition: &InferencePartition,
) -> Result<ConditionReport> {
    let pred = clf.predict(windows)?;
    Ok(ConditionReport {
        f1: f1_per_list(&pred, truths, partition)?,
        confusion: category_confusion(&pred, truths, partition)?,
    })
}

/// Scores `clf` on the test windows before and after `transform`.
pub fn evaluate_pipeline(
    clf: &Classifier,
    transform: &dyn WindowTransform,
    test: &[Window],
    partition: &InferencePartition,
) -> Result<EvalReport> {
    let truths: Vec<u32> = test.iter().map(|w| w.label).collect();
    let transformed = transform.transform_batch(test)?;
    Ok(EvalReport {
        original: condition(clf, test, &truths, partition)?,
        transformed: condition(clf, &transformed, &truths, partition)?,
        windows: test.len(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl EvalReport {
    fn conditions(&self) -> [(&'static str, &ConditionReport); 2] {
        [
            ("original", &self.original),
            ("transformed", &self.transformed),
        ]
    }

    /// `list,condition,f1` with one row per list and condition.
    pub fn f1_csv(&self) -> String {
        let mut s = String::from("list,condition,f1\n");
        for cat in Category::ALL {
            for (name, c) in self.conditions() {
                let _ = writeln!(s, "{},{name},{}", cat.name(), fmt_opt(c.f1.get(cat)));
            }
        }
        s
    }

    /// `condition,true_category,pred_W,pred_B,pred_G`.
    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("condition,true_category,pred_W,pred_B,pred_G\n");
        for (name, c) in self.conditions() {
            for t in Category::ALL {
                let row = c.confusion.0[t.index()];
                let _ = writeln!(s, "{name},{},{},{},{}", t.letter(), row[0], row[1], row[2]);
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} test windows", self.windows);
        let _ = writeln!(s, "{:<8}{:>10}{:>10}", "list", "OF1", "TF1");
        for cat in Category::ALL {
            let pct = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{:.2}", 100.0 * x));
            let _ = writeln!(
                s,
                "{:<8}{:>10}{:>10}",
                cat.name(),
                pct(self.original.f1.get(cat)),
                pct(self.transformed.f1.get(cat))
            );
        }
        for (name, c) in self.conditions() {
            let _ = writeln!(s, "\n{name} (rows: true, columns: predicted)");
            let _ = writeln!(s, "{:<4}{:>8}{:>8}{:>8}", "", "W", "B", "G");
            for t in Category::ALL {
                let row = c.confusion.0[t.index()];
                let _ = writeln!(
                    s,
                    "{:<4}{:>8}{:>8}{:>8}",
                    t.letter(),
                    row[0],
                    row[1],
                    row[2]
                );
            }
        }
        s
    }
}
