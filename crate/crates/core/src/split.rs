//! Choosing which unstable neuron a branch is split on.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lirpa::{ConstraintSet, LinearBoundsSet, NeuronId};
use crate::prob::{derive_seed, uncertainty_level, GaussianInput, TruncationDomain};

/// Default uncertainty threshold for the score-guided strategy.
pub const DEFAULT_TAU: f64 = 0.01;

/// Neuron selected for splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitChoice {
    pub neuron: NeuronId,
    pub uncertainty: f64,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Strategy {
    /// First unstable neuron of the earliest layer that has one.
    Ordered,
    /// Highest intercept score whose uncertainty level is at most `tau`.
    BabsrProb { tau: f64 },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Ordered => "ordered",
            Strategy::BabsrProb { .. } => "babsr-prob",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Ordered => write!(f, "ordered"),
            Strategy::BabsrProb { tau } => write!(f, "babsr-prob(tau={tau})"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordered" => Ok(Strategy::Ordered),
            "babsr-prob" | "babsr" => Ok(Strategy::BabsrProb { tau: DEFAULT_TAU }),
            other => Err(Error::InvalidArgument(format!(
                "unknown strategy '{other}'"
            ))),
        }
    }
}

/// Lowest-index unstable neuron of the earliest layer containing one.
///
/// Every earlier layer is stable, so no relaxation feeds the chosen neuron's
/// linear bounds and its lower and upper rows coincide; a mismatch is an
/// engine error.
pub fn select_ordered(
    bounds: &LinearBoundsSet,
    constraints: &ConstraintSet,
) -> Result<SplitChoice> {
    let neuron = bounds
        .unstable_neurons(constraints)
        .into_iter()
        .next()
        .ok_or(Error::NoUnstableNeuron)?;
    if !bounds.per_layer[neuron.layer].rows_identical(neuron.index) {
        return Err(Error::Invariant(format!(
            "ordered choice {neuron} has distinct lower and upper bound rows"
        )));
    }
    Ok(SplitChoice {
        neuron,
        uncertainty: 0.0,
        score: 0.0,
    })
}

/// Intercept scores `|lambda| * u * (-l) / (u - l)` for every unstable neuron,
/// where `lambda` is the coefficient on the neuron's ReLU output in the
/// lower-bound backward pass of `f`.
pub fn babsr_scores(
    bounds: &LinearBoundsSet,
    constraints: &ConstraintSet,
) -> BTreeMap<NeuronId, f64> {
    bounds
        .unstable_neurons(constraints)
        .into_iter()
        .map(|n| {
            let l = bounds.concrete_lower[n.layer][n.index];
            let u = bounds.concrete_upper[n.layer][n.index];
            let lambda = bounds.output_lower_coeffs[n.layer][n.index];
            (n, lambda.abs() * u * (-l) / (u - l))
        })
        .collect()
}

/// Neurons sorted by descending score; ties by `(layer, index)`.
fn ranked(scores: &BTreeMap<NeuronId, f64>) -> Vec<(NeuronId, f64)> {
    let mut ranked: Vec<(NeuronId, f64)> = scores.iter().map(|(n, s)| (*n, *s)).collect();
    ranked.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        other => other,
    });
    ranked
}

/// Walks neurons by descending score and returns the first whose
/// uncertainty level does not exceed `threshold`. Uncertainty levels are
/// evaluated lazily.
#[allow(clippy::too_many_arguments)]
pub fn select_babsr_prob(
    bounds: &LinearBoundsSet,
    constraints: &ConstraintSet,
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
    threshold: f64,
    n_samples: u64,
    seed: u64,
) -> Result<SplitChoice> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold must be nonnegative, got {threshold}"
        )));
    }
    let scores = babsr_scores(bounds, constraints);
    if scores.is_empty() {
        return Err(Error::NoUnstableNeuron);
    }
    for (neuron, score) in ranked(&scores) {
        let neuron_seed = derive_seed(seed, &[neuron.layer as u64, neuron.index as u64]);
        let level = uncertainty_level(bounds, neuron, gaussian, domain, n_samples, neuron_seed)?;
        if level.value <= threshold {
            return Ok(SplitChoice {
                neuron,
                uncertainty: level.value,
                score,
            });
        }
    }
    Err(Error::Invariant(
        "no unstable neuron has uncertainty below the threshold".into(),
    ))
}

/// Inputs the strategies need beyond the branch itself.
pub struct SelectionContext<'a> {
    pub gaussian: &'a GaussianInput,
    pub domain: &'a TruncationDomain,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn choose_split(
    strategy: Strategy,
    bounds: &LinearBoundsSet,
    constraints: &ConstraintSet,
    ctx: &SelectionContext<'_>,
) -> Result<SplitChoice> {
    match strategy {
        Strategy::Ordered => select_ordered(bounds, constraints),
        Strategy::BabsrProb { tau } => select_babsr_prob(
            bounds,
            constraints,
            ctx.gaussian,
            ctx.domain,
            tau,
            ctx.n_samples,
            ctx.seed,
        ),
    }
}
