//! Model file round trips and rejection of damaged files.

use raekit::config::{DataSource, ExperimentConfig};
use raekit::data::SyntheticConfig;
use raekit::pipeline::{prepare, train_rae_stage};
use raekit::rae::{load_model, save_model, TrainedRae, WindowTransform, MODEL_VERSION};
use raekit::Error;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.data = DataSource::Synthetic(SyntheticConfig {
        channels: 4,
        windows_per_class: 40,
        window_len: 16,
        step: 4,
        ..SyntheticConfig::default()
    });
    cfg.window.length = 16;
    cfg.window.step = 4;
    cfg.rae.train.fit.epochs = 3;
    cfg.validate().unwrap();
    cfg
}

fn trained() -> (TrainedRae, Vec<raekit::data::Window>) {
    let cfg = small_config();
    let prepared = prepare(&cfg).unwrap();
    (train_rae_stage(&cfg, &prepared).unwrap(), prepared.test)
}

#[test]
fn save_then_load_is_identical() {
    let (model, test) = trained();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/dir/rae.model");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(loaded.network(), model.network());
    assert_eq!(loaded.norm(), model.norm());
    assert_eq!(loaded.partition(), model.partition());
    assert_eq!(loaded.topology(), model.topology());
    let a = model.transform_batch(&test).unwrap();
    let b = loaded.transform_batch(&test).unwrap();
    assert_eq!(a, b);
    assert_eq!(loaded.to_bytes().unwrap(), model.to_bytes().unwrap());
}

#[test]
fn file_starts_with_magic_and_version() {
    let (model, _) = trained();
    let bytes = model.to_bytes().unwrap();
    assert_eq!(&bytes[..8], b"RAEMODEL");
    assert_eq!(
        u32::from_le_bytes(bytes[8..12].try_into().unwrap()),
        MODEL_VERSION
    );
}

#[test]
fn any_flipped_byte_is_rejected() {
    let (model, _) = trained();
    let bytes = model.to_bytes().unwrap();
    for pos in [12, 20, bytes.len() / 2, bytes.len() - 5, bytes.len() - 1] {
        let mut bad = bytes.clone();
        bad[pos] ^= 0x40;
        let err = TrainedRae::from_bytes(&bad).unwrap_err();
        assert!(matches!(err, Error::Checksum { .. }), "byte {pos}: {err}");
    }
}

#[test]
fn wrong_magic_and_future_version() {
    let (model, _) = trained();
    let bytes = model.to_bytes().unwrap();
    let mut bad = bytes.clone();
    bad[..8].copy_from_slice(b"NOTAMODL");
    assert!(matches!(
        TrainedRae::from_bytes(&bad),
        Err(Error::Magic { .. })
    ));

    let mut future = bytes.clone();
    future[8..12].copy_from_slice(&(MODEL_VERSION + 1).to_le_bytes());
    match TrainedRae::from_bytes(&future) {
        Err(Error::Version { found, supported }) => {
            assert_eq!(found, MODEL_VERSION + 1);
            assert_eq!(supported, MODEL_VERSION);
        }
        other => panic!("expected a version error, got {other:?}"),
    }
}

#[test]
fn truncated_file_is_rejected() {
    let (model, _) = trained();
    let bytes = model.to_bytes().unwrap();
    for len in [0, 7, 12, 30, bytes.len() - 1] {
        assert!(
            TrainedRae::from_bytes(&bytes[..len]).is_err(),
            "length {len}"
        );
    }
}

#[test]
fn wrong_window_shape_is_a_shape_error() {
    let (model, test) = trained();
    let w = &test[0];
    let wrong = raekit::data::Window::from_flat(3, 16, vec![0.0; 48], w.label).unwrap();
    assert!(matches!(
        model.transform_window(&wrong),
        Err(Error::Shape(_))
    ));
}
