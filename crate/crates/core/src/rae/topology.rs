use serde::{Deserialize, Serialize};

use crate::nn::{Activation, Network};
use crate::{Error, Result};

/// Hidden-layer size profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `inp/2, inp/8, inp/16, inp/8, inp/2`
    Deep,
    /// `inp/2, inp/3, inp/4, inp/3, inp/2`, for low-dimensional inputs.
    Shallow,
}

impl Profile {
    fn divisors(self) -> [usize; 5] {
        match self {
            Profile::Deep => [2, 8, 16, 8, 2],
            Profile::Shallow => [2, 3, 4, 3, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaeTopology {
    pub channels: usize,
    pub window_len: usize,
    pub input_dim: usize,
    pub profile: Profile,
    pub hidden: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

impl RaeTopology {
    /// Every width from input to output.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.hidden.len() + 2);
        s.push(self.input_dim);
        s.extend_from_slice(&self.hidden);
        s.push(self.input_dim);
        s
    }

    pub fn activations(&self) -> Vec<Activation> {
        let mut a = vec![self.hidden_activation; self.hidden.len()];
        a.push(self.output_activation);
        a
    }

    pub fn build_network(&self, seed: u64) -> Result<Network> {
        Network::random(
            &self.sizes(),
            &self.activations(),
            &mut crate::seed::rng(seed),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        self.hidden.iter().eq(self.hidden.iter().rev())
    }
}

/// Sizes the five hidden layers from `inp = k·d` using floor division.
pub fn build_rae_topology(
    channels: usize,
    window_len: usize,
    profile: Profile,
) -> Result<RaeTopology> {
    if channels == 0 || window_len == 0 {
        return Err(Error::Topology(
            "channels and window length must be positive".into(),
        ));
    }
    let input_dim = channels * window_len;
    let hidden: Vec<usize> = profile.divisors().iter().map(|d| input_dim / d).collect();
    if let Some(pos) = hidden.iter().position(|&h| h == 0) {
        return Err(Error::Topology(format!(
            "input dimension {input_dim} gives an empty hidden layer {} (inp/{})",
            pos + 1,
            profile.divisors()[pos]
        )));
    }
    Ok(RaeTopology {
        channels,
        window_len,
        input_dim,
        profile,
        hidden,
        hidden_activation: Activation::Selu,
        output_activation: Activation::Linear,
    })
}
