use rand::Rng;

use super::Tensor2;
use crate::seed;

/// Glorot/Xavier uniform samples in `±sqrt(6 / (fan_in + fan_out))` for a
/// `(fan_out, fan_in)` weight matrix.
pub fn glorot_uniform<R: Rng + ?Sized>(fan_out: usize, fan_in: usize, rng: &mut R) -> Tensor2 {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let mut t = Tensor2::zeros(fan_out, fan_in);
    for w in t.data_mut() {
        *w = rng.random_range(-limit..=limit);
    }
    t
}

/// Seeded Glorot-uniform tensor of shape `(rows, cols)`.
pub fn init_weights(rows: usize, cols: usize, seed: u64) -> Tensor2 {
    glorot_uniform(rows, cols, &mut seed::rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn within_glorot_bound() {
        let bound = (6.0f64 / 4.0).sqrt();
        for s in 0..50 {
            let t = init_weights(2, 2, s);
            assert!(t.data().iter().all(|w| w.abs() <= bound));
        }
    }

    #[test]
    fn seeded() {
        assert_eq!(init_weights(3, 5, 7), init_weights(3, 5, 7));
        assert_ne!(init_weights(3, 5, 7), init_weights(3, 5, 8));
    }
}
