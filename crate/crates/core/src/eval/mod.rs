//! Utility/privacy evaluation.
//!
//! A dense softmax classifier stands in for the third-party recognition
//! service. It is trained on original windows only and then scored on the
//! original and the transformed test windows.

mod classifier;
mod metrics;
mod report;

pub use classifier::{
    load_classifier, save_classifier, train_classifier, Classifier, ClassifierConfig,
};
pub use metrics::{
    category_confusion, class_scores, f1_per_list, CategoryConfusion, ClassScore, ListF1,
};
pub use report::{evaluate_pipeline, ConditionReport, EvalReport};
