//! Ground truth by direct sampling.
//!
//! Nothing here touches linear relaxations: samples are drawn from the
//! untruncated Gaussian and classified by exact forward evaluation.

use std::collections::HashSet;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lirpa::{ConstraintSet, InputBox, NeuronId, Sign};
use crate::model::{Network, ProblemInstance};
use crate::prob::{derive_seed, GaussianInput};

pub const MIN_ORACLE_SAMPLES: u64 = 10_000;
pub const MAX_PATTERN_NEURONS: usize = 22;
/// Samples per parallel chunk; chunk `i` is seeded with `derive_seed(seed, [i])`.
const CHUNK: u64 = 1 << 16;
const FEASIBILITY_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub hits: u64,
    pub n_samples: u64,
    pub std_error: f64,
}

impl OracleEstimate {
    pub fn from_counts(hits: u64, n_samples: u64) -> Self {
        let value = hits as f64 / n_samples as f64;
        Self {
            value,
            hits,
            n_samples,
            std_error: (value * (1.0 - value) / n_samples as f64).sqrt(),
        }
    }
}

/// Forward evaluator with reusable buffers.
struct Evaluator<'a> {
    network: &'a Network,
    acts: Vec<Vec<f64>>,
}

impl<'a> Evaluator<'a> {
    fn new(network: &'a Network) -> Self {
        let acts = network
            .layers()
            .iter()
            .map(|l| vec![0.0; l.output_dim()])
            .collect();
        Self { network, acts }
    }

    /// Fills the preactivations of every layer; the last entry is the output.
    fn run(&mut self, x: &[f64]) {
        for (k, layer) in self.network.layers().iter().enumerate() {
            let (done, rest) = self.acts.split_at_mut(k);
            let out = &mut rest[0];
            let w = layer.weights();
            let b = layer.bias();
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = b[i];
                if k == 0 {
                    for (j, xj) in x.iter().enumerate() {
                        acc += w[(i, j)] * xj;
                    }
                } else {
                    for (j, yj) in done[k - 1].iter().enumerate() {
                        acc += w[(i, j)] * yj.max(0.0);
                    }
                }
                *o = acc;
            }
        }
    }

    fn output(&self) -> f64 {
        self.acts.last().expect("network has layers")[0]
    }

    fn satisfies(&self, constraints: &ConstraintSet) -> bool {
        constraints
            .iter()
            .all(|(n, s)| s.holds(self.acts[n.layer][n.index]))
    }

    fn pattern_bits(&self, neurons: &[NeuronId]) -> u64 {
        neurons.iter().enumerate().fold(0u64, |bits, (i, n)| {
            if self.acts[n.layer][n.index] >= 0.0 {
                bits | (1 << i)
            } else {
                bits
            }
        })
    }
}

fn count_chunk(
    network: &Network,
    gaussian: &GaussianInput,
    constraints: Option<&ConstraintSet>,
    n: u64,
    seed: u64,
) -> u64 {
    let mut eval = Evaluator::new(network);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; gaussian.dim()];
    let mut x = vec![0.0; gaussian.dim()];
    let mut hits = 0;
    for _ in 0..n {
        gaussian.sample_into(&mut rng, &mut z, &mut x);
        eval.run(&x);
        if eval.output() > 0.0 && constraints.is_none_or(|c| eval.satisfies(c)) {
            hits += 1;
        }
    }
    hits
}

fn chunks(n_samples: u64) -> Vec<(u64, u64)> {
    (0..n_samples.div_ceil(CHUNK))
        .map(|i| (i, CHUNK.min(n_samples - i * CHUNK)))
        .collect()
}

/// Estimates `P[f(X) > 0 and X satisfies constraints]` for scalar `f`.
pub fn oracle_probability(
    network: &Network,
    gaussian: &GaussianInput,
    constraints: Option<&ConstraintSet>,
    n_samples: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    if n_samples < MIN_ORACLE_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "oracle needs at least {MIN_ORACLE_SAMPLES} samples, got {n_samples}"
        )));
    }
    if !network.is_scalar() {
        return Err(Error::Shape(
            "oracle requires a scalar-output network".into(),
        ));
    }
    if network.input_dim() != gaussian.dim() {
        return Err(Error::Shape(format!(
            "network input {} does not match gaussian dimension {}",
            network.input_dim(),
            gaussian.dim()
        )));
    }
    if let Some(c) = constraints {
        c.validate(network)?;
    }
    let hits: u64 = chunks(n_samples)
        .into_par_iter()
        .map(|(i, n)| count_chunk(network, gaussian, constraints, n, derive_seed(seed, &[i])))
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(OracleEstimate::from_counts(hits, n_samples))
}

/// Reference verdict for `P[f(X) > 0] >= eta`: 10^6 samples, raised to 10^7
/// when the estimate lands within 0.01 of the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub holds: bool,
    pub estimate: OracleEstimate,
}

pub fn oracle_verdict(problem: &ProblemInstance, seed: u64) -> Result<OracleVerdict> {
    let gaussian = GaussianInput::new(problem.input_mean.clone(), problem.input_cov.clone())?;
    let mut estimate = oracle_probability(&problem.network, &gaussian, None, 1_000_000, seed)?;
    if (estimate.value - problem.eta).abs() < 0.01 {
        estimate = oracle_probability(
            &problem.network,
            &gaussian,
            None,
            10_000_000,
            derive_seed(seed, &[1]),
        )?;
    }
    Ok(OracleVerdict {
        holds: estimate.value >= problem.eta,
        estimate,
    })
}

/// All `2^U` sign assignments over `neurons`, each with a hint that is
/// `false` when no uniform sample from `domain` realised the pattern.
pub fn enumerate_patterns(
    network: &Network,
    domain: &InputBox,
    neurons: &[NeuronId],
    seed: u64,
) -> Result<Vec<(ConstraintSet, bool)>> {
    if neurons.len() > MAX_PATTERN_NEURONS {
        return Err(Error::InvalidArgument(format!(
            "{} neurons exceed the enumeration cap of {MAX_PATTERN_NEURONS}",
            neurons.len()
        )));
    }
    if domain.dim() != network.input_dim() {
        return Err(Error::Shape(
            "domain dimension does not match the network".into(),
        ));
    }
    let hidden = network.hidden_layers();
    for n in neurons {
        if n.layer >= hidden || n.index >= network.layer(n.layer).output_dim() {
            return Err(Error::UnknownNeuron {
                layer: n.layer,
                index: n.index,
            });
        }
    }
    let mut eval = Evaluator::new(network);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; domain.dim()];
    let mut seen = HashSet::new();
    for _ in 0..FEASIBILITY_SAMPLES {
        for (i, xi) in x.iter_mut().enumerate() {
            let (lo, hi) = (domain.lo()[i], domain.hi()[i]);
            *xi = if lo < hi {
                rng.random_range(lo..hi)
            } else {
                lo
            };
        }
        eval.run(&x);
        seen.insert(eval.pattern_bits(neurons));
    }
    let patterns = (0..1u64 << neurons.len())
        .map(|bits| {
            let set: ConstraintSet = neurons
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    (
                        n,
                        if bits & (1 << i) != 0 {
                            Sign::GeqZero
                        } else {
                            Sign::LtZero
                        },
                    )
                })
                .collect();
            (set, seen.contains(&bits))
        })
        .collect();
    Ok(patterns)
}

/// Exact output of `network` at `x`, independent of the model's own forward
/// pass.
pub fn reference_output(network: &Network, x: &DVector<f64>) -> f64 {
    let mut eval = Evaluator::new(network);
    eval.run(x.as_slice());
    eval.output()
}
