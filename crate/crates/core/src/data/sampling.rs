use rand::seq::{index, SliceRandom};

use super::Window;
use crate::{seed, Error, Result};

/// Randomly keeps `round(keep_fraction · n)` of the `n` windows labelled
/// `class_id`. Other windows and the overall order are untouched.
pub fn downsample_class(
    windows: &[Window],
    class_id: u32,
    keep_fraction: f64,
    seed: u64,
) -> Result<Vec<Window>> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::config(format!(
            "keep fraction {keep_fraction} must be in (0, 1]"
        )));
    }
    let members: Vec<usize> = windows
        .iter()
        .enumerate()
        .filter(|(_, w)| w.label == class_id)
        .map(|(i, _)| i)
        .collect();
    let keep_n = (keep_fraction * members.len() as f64).round() as usize;
    let mut keep = vec![true; windows.len()];
    if keep_n < members.len() {
        let mut rng = seed::rng(seed);
        members.iter().for_each(|&i| keep[i] = false);
        for j in index::sample(&mut rng, members.len(), keep_n) {
            keep[members[j]] = true;
        }
    }
    Ok(windows
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(w, _)| w.clone())
        .collect())
}

/// Random disjoint split with `round(train_fraction · n)` training windows.
/// Both halves keep the input order.
pub fn split_train_test(
    windows: &[Window],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<Window>, Vec<Window>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::config(format!(
            "train fraction {train_fraction} must be in (0, 1)"
        )));
    }
    let n = windows.len();
    let n_train = (train_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut is_train = vec![false; n];
    order[..n_train].iter().for_each(|&i| is_train[i] = true);
    let (mut train, mut test) = (Vec::with_capacity(n_train), Vec::with_capacity(n - n_train));
    for (w, t) in windows.iter().zip(is_train) {
        if t {
            train.push(w.clone());
        } else {
            test.push(w.clone());
        }
    }
    Ok((train, test))
}
