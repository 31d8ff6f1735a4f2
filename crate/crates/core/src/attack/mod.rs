//! Detectability of replaced windows.
//!
//! An adversary who holds gray-listed data trains a GAN on it, then uses the
//! discriminator to tell real gray windows from black windows the
//! autoencoder rewrote ("fake gray"). Accuracies use a 0.5 threshold on the
//! discriminator's probability of "real".

mod eval;
mod gan;

pub use eval::{
    cross_user_eval, four_way_eval, real_accuracy, reject_accuracy, AttackReport, AttackRow,
};
pub use gan::{train_gan, Gan, GanConfig, Snapshot};
