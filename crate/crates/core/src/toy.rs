//! Random small networks for soundness and completeness checks.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::model::{AffineLayer, Network, ProblemInstance};
use crate::prob::{derive_seed, Covariance};

/// Architecture and noise of a toy corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    /// Layer widths from input to output; the last must be 1.
    pub widths: Vec<usize>,
    /// Variance of every weight and bias.
    pub weight_variance: f64,
    /// Per-coordinate variance of the input noise around `x0 = 0`.
    pub noise_variance: f64,
    pub eta: f64,
    pub truncation_z: f64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            widths: vec![5, 10, 10, 1],
            weight_variance: 0.25,
            noise_variance: 0.1,
            eta: 0.95,
            truncation_z: 3.0,
        }
    }
}

impl ToyConfig {
    fn random_network(&self, rng: &mut ChaCha8Rng) -> Result<Network> {
        let normal = Normal::new(0.0, self.weight_variance.sqrt()).expect("finite variance");
        let layers = self
            .widths
            .windows(2)
            .map(|w| {
                let weights = DMatrix::from_fn(w[1], w[0], |_, _| normal.sample(rng));
                let bias = DVector::from_fn(w[1], |_, _| normal.sample(rng));
                AffineLayer::new(weights, bias)
            })
            .collect::<Result<Vec<_>>>()?;
        Network::new(layers)
    }

    /// Draws networks from `seed` until one has `f(0) > 0`.
    pub fn network(&self, seed: u64) -> Result<Network> {
        let origin = DVector::zeros(self.widths[0]);
        for attempt in 0u64.. {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[attempt]));
            let net = self.random_network(&mut rng)?;
            if net.forward(&origin)? > 0.0 {
                return Ok(net);
            }
        }
        unreachable!("attempt counter is unbounded")
    }

    pub fn instance(&self, seed: u64) -> Result<ProblemInstance> {
        let dim = self.widths[0];
        ProblemInstance::new(
            self.network(seed)?,
            DVector::zeros(dim),
            Covariance::isotropic(dim, self.noise_variance.sqrt()),
            self.eta,
            self.truncation_z,
        )
    }

    /// `count` instances; instance `i` uses `derive_seed(base_seed, [i])`.
    pub fn corpus(&self, count: usize, base_seed: u64) -> Result<Vec<ProblemInstance>> {
        (0..count as u64)
            .map(|i| self.instance(derive_seed(base_seed, &[i])))
            .collect()
    }
}
