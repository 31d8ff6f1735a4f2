use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Window;
use crate::nn::{Activation, Loss, Network, Optimizer, OptimizerKind, Tensor2};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GanConfig {
    pub noise_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Adam β₁; GANs are usually trained with 0.5.
    pub beta1: f64,
    /// Epochs after which generator and discriminator are kept.
    pub snapshots: Vec<usize>,
    /// Generator samples drawn for the generated / top-decile categories.
    pub n_generated: usize,
    pub seed: u64,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            noise_dim: 64,
            epochs: 100,
            batch_size: 16,
            learning_rate: 1e-3,
            beta1: 0.5,
            snapshots: vec![1, 5, 10, 20, 30, 50, 70, 100],
            n_generated: 500,
            seed: 5,
        }
    }
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.noise_dim == 0 || self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::config(
                "noise dim, batch size and epochs must be positive",
            ));
        }
        if self.n_generated == 0 {
            return Err(Error::config("n_generated must be positive"));
        }
        if let Some(e) = self.snapshots.iter().find(|&&e| e == 0 || e > self.epochs) {
            return Err(Error::config(format!(
                "snapshot epoch {e} is outside 1..={}",
                self.epochs
            )));
        }
        Ok(())
    }
}

/// Generator and discriminator as they stood after `epoch`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub epoch: usize,
    pub generator: Network,
    pub discriminator: Network,
}

impl Snapshot {
    /// Probability of "real" per window.
    pub fn score(&self, windows: &[Window]) -> Result<Vec<f64>> {
        score(&self.discriminator, windows)
    }

    /// Draws `n` generator samples shaped like `(channels, len)` windows.
    pub fn generate<R: Rng + ?Sized>(
        &self,
        n: usize,
        shape: (usize, usize),
        rng: &mut R,
    ) -> Result<Vec<Window>> {
        let noise = noise(n, self.generator.input_dim(), rng);
        let out = self.generator.forward(&noise)?;
        out.iter_rows()
            .map(|r| Window::from_flat(shape.0, shape.1, r.to_vec(), 0))
            .collect()
    }
}

pub(crate) fn score(discriminator: &Network, windows: &[Window]) -> Result<Vec<f64>> {
    if windows.is_empty() {
        return Ok(Vec::new());
    }
    let batch = Tensor2::from_rows(&windows.iter().map(Window::flat).collect::<Vec<_>>())?;
    Ok(discriminator.forward(&batch)?.into_data())
}

fn noise<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Tensor2 {
    let data = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Tensor2::new(rows, cols, data).expect("sized above")
}

#[derive(Debug, Clone)]
pub struct Gan {
    pub generator: Network,
    pub discriminator: Network,
    pub config: GanConfig,
    pub window_shape: (usize, usize),
    pub snapshots: Vec<Snapshot>,
    /// Mean discriminator and generator loss per epoch.
    pub d_loss: Vec<f64>,
    pub g_loss: Vec<f64>,
}

impl Gan {
    pub fn final_snapshot(&self) -> Snapshot {
        Snapshot {
            epoch: self.config.epochs,
            generator: self.generator.clone(),
            discriminator: self.discriminator.clone(),
        }
    }
}

/// Dense GAN: generator `noise → inp/4 (selu) → inp (linear)`,
/// discriminator `inp → inp/4 (selu) → 1 (sigmoid)`.
///
/// Each step updates the discriminator on a real and a generated batch, then
/// the generator with the non-saturating loss `-ln D(G(z))`.
pub fn train_gan(gray: &[Window], cfg: &GanConfig) -> Result<Gan> {
    cfg.validate()?;
    let first = gray
        .first()
        .ok_or_else(|| Error::Data("GAN needs at least one gray-listed window".into()))?;
    let shape = first.shape();
    if gray.iter().any(|w| w.shape() != shape) {
        return Err(Error::shape("gray windows differ in shape"));
    }
    let inp = shape.0 * shape.1;
    let hidden = (inp / 4).max(1);
    let mut rng = seed::rng(seed::derive(cfg.seed, 0x6A4));
    let mut generator = Network::random(
        &[cfg.noise_dim, hidden, inp],
        &[Activation::Selu, Activation::Linear],
        &mut rng,
    )?;
    let mut discriminator = Network::random(
        &[inp, hidden, 1],
        &[Activation::Selu, Activation::Sigmoid],
        &mut rng,
    )?;
    let adam = OptimizerKind::Adam {
        beta1: cfg.beta1,
        beta2: 0.999,
        epsilon: 1e-8,
    };
    let mut opt_g = Optimizer::new(adam, cfg.learning_rate, &generator);
    let mut opt_d = Optimizer::new(adam, cfg.learning_rate, &discriminator);

    let real_all = Tensor2::from_rows(&gray.iter().map(Window::flat).collect::<Vec<_>>())?;
    let mut order: Vec<usize> = (0..gray.len()).collect();
    let mut snapshots = Vec::new();
    let (mut d_hist, mut g_hist) = (Vec::new(), Vec::new());

    for epoch in 1..=cfg.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let (mut d_total, mut g_total, mut steps) = (0.0, 0.0, 0usize);
        for chunk in order.chunks(cfg.batch_size) {
            let n = chunk.len();
            let real = real_all.select_rows(chunk);
            let fake = generator.forward(&noise(n, cfg.noise_dim, &mut rng))?;

            let mut both = real.into_data();
            both.extend_from_slice(fake.data());
            let both = Tensor2::new(2 * n, inp, both)?;
            let mut labels = vec![1.0; n];
            labels.extend(std::iter::repeat_n(0.0, n));
            let labels = Tensor2::new(2 * n, 1, labels)?;
            let (d_loss, d_grads) =
                discriminator.backprop(&both, &labels, Loss::BinaryCrossEntropy)?;
            if !d_loss.is_finite() || !d_grads.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            opt_d.step(&mut discriminator, &d_grads);

            let z = noise(n, cfg.noise_dim, &mut rng);
            let g_cache = generator.forward_cached(&z)?;
            let d_cache = discriminator.forward_cached(g_cache.output())?;
            let ones = Tensor2::filled(n, 1, 1.0);
            let g_loss = Loss::BinaryCrossEntropy.eval(d_cache.output(), &ones)?;
            let delta = discriminator.output_delta(&d_cache, &ones, Loss::BinaryCrossEntropy)?;
            let (_, grad_fake) = discriminator.backward_from_pre(&d_cache, delta);
            let (g_grads, _) = generator.backward(&g_cache, &grad_fake)?;
            if !g_loss.is_finite() || !g_grads.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            opt_g.step(&mut generator, &g_grads);

            d_total += d_loss;
            g_total += g_loss;
            steps += 1;
        }
        d_hist.push(d_total / steps as f64);
        g_hist.push(g_total / steps as f64);
        if cfg.snapshots.contains(&epoch) {
            snapshots.push(Snapshot {
                epoch,
                generator: generator.clone(),
                discriminator: discriminator.clone(),
            });
        }
    }
    Ok(Gan {
        generator,
        discriminator,
        config: cfg.clone(),
        window_shape: shape,
        snapshots,
        d_loss: d_hist,
        g_loss: g_hist,
    })
}
