//! Stage-by-stage runs on a small synthetic user.

use raekit::archive::PreparedWindows;
use raekit::config::{DataSource, ExperimentConfig};
use raekit::data::{Category, SyntheticConfig};
use raekit::pipeline::*;
use raekit::rae::{load_model, save_model};

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.data = DataSource::Synthetic(SyntheticConfig {
        windows_per_class: 120,
        ..SyntheticConfig::default()
    });
    cfg.rae.train.fit.epochs = 15;
    cfg.classifier.fit.epochs = 15;
    cfg.attack.gan.epochs = 5;
    cfg.attack.gan.snapshots = vec![1, 5];
    cfg.attack.gan.n_generated = 50;
    cfg.validate().unwrap();
    cfg
}

#[test]
fn prepared_windows_are_normalized_on_train() {
    let cfg = small_config();
    let prepared = prepare(&cfg).unwrap();
    // Windows run over the whole series, including across class blocks.
    let records = 6 * (119 * 3 + 30);
    let total = (records - 30) / 3 + 1;
    assert_eq!(prepared.train.len() + prepared.test.len(), total);
    assert_eq!(prepared.train.len(), (0.8 * total as f64).round() as usize);
    let k = prepared.channels;
    for c in 0..k {
        let vals: Vec<f64> = prepared
            .train
            .iter()
            .flat_map(|w| w.values().row(c).to_vec())
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        assert!(mean.abs() < 1e-5, "channel {c} mean {mean}");
        assert!((var - 1.0).abs() < 1e-4, "channel {c} var {var}");
    }
}

#[test]
fn archive_file_round_trip() {
    let cfg = small_config();
    let prepared = prepare(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(PREPARED_FILE);
    prepared.save(&path).unwrap();
    assert_eq!(PreparedWindows::load(&path).unwrap(), prepared);
}

#[test]
fn staged_through_files_equals_in_memory() {
    let cfg = small_config();
    let prepared = prepare(&cfg).unwrap();
    let rae = train_rae_stage(&cfg, &prepared).unwrap();
    let clf = train_classifier_stage(&cfg, &prepared).unwrap();
    let report = evaluate_stage(&clf, &rae, &prepared).unwrap();

    let dir = tempfile::tempdir().unwrap();
    prepared.save(dir.path().join(PREPARED_FILE)).unwrap();
    save_model(&rae, dir.path().join(MODEL_FILE)).unwrap();
    let prepared2 = PreparedWindows::load(dir.path().join(PREPARED_FILE)).unwrap();
    let rae2 = load_model(dir.path().join(MODEL_FILE)).unwrap();
    let clf2 = train_classifier_stage(&cfg, &prepared2).unwrap();
    assert_eq!(clf, clf2);
    let report2 = evaluate_stage(&clf2, &rae2, &prepared2).unwrap();
    assert_eq!(report, report2);
    assert_eq!(report.f1_csv(), report2.f1_csv());

    write_eval_reports(dir.path(), &report).unwrap();
    for f in [F1_CSV, CONFUSION_CSV, EVAL_TEXT] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn full_run_is_deterministic() {
    let run = || {
        let cfg = small_config();
        let prepared = prepare(&cfg).unwrap();
        let rae = train_rae_stage(&cfg, &prepared).unwrap();
        let clf = train_classifier_stage(&cfg, &prepared).unwrap();
        let report = evaluate_stage(&clf, &rae, &prepared).unwrap();
        let attack = attack_stage(&cfg, &prepared, &rae).unwrap();
        (
            report.f1_csv(),
            report.confusion_csv(),
            attack.same_user.to_csv(),
            attack.cross_user.unwrap().to_csv(),
        )
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a.2.lines().count(), 3);
    assert_eq!(a.3.lines().count(), 3);
}

#[test]
fn cross_user_gray_is_gray_and_differs() {
    let cfg = small_config();
    let prepared = prepare(&cfg).unwrap();
    let cross = cfg.attack.cross_user.clone().unwrap();
    let other = cross_user_gray(&cfg, &cross, &prepared.norm, &prepared.partition).unwrap();
    assert!(other.len() >= 120, "{}", other.len());
    assert!(other
        .iter()
        .all(|w| prepared.partition.category(w.label) == Some(Category::Gray)));
    let own: Vec<_> = prepared
        .train
        .iter()
        .chain(&prepared.test)
        .filter(|w| prepared.partition.category(w.label) == Some(Category::Gray))
        .collect();
    assert_ne!(own[0].values(), other[0].values());
}

#[test]
fn too_few_records_is_a_data_error() {
    let mut cfg = small_config();
    cfg.window.length = 100_000;
    let err = prepare(&cfg).unwrap_err();
    assert!(
        matches!(err, raekit::Error::Data(_) | raekit::Error::Config(_)),
        "{err}"
    );
}
