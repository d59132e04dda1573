//! Fixtures shared by the benchmarks.

use probverif_core::prob::derive_seed;
use probverif_core::{
    compute_linear_bounds, ConstraintSet, GaussianInput, ProblemInstance, Sign, ToyConfig,
    TruncationDomain,
};

/// Seed of the standard toy corpus.
pub const CORPUS_SEED: u64 = 2024;

/// Instance `index` of the standard toy corpus.
pub fn toy(index: u64) -> ProblemInstance {
    ToyConfig::default()
        .instance(derive_seed(CORPUS_SEED, &[index]))
        .expect("toy instances are valid")
}

pub fn gaussian(problem: &ProblemInstance) -> GaussianInput {
    GaussianInput::new(problem.input_mean.clone(), problem.input_cov.clone()).expect("valid input")
}

pub fn domain(problem: &ProblemInstance) -> TruncationDomain {
    TruncationDomain::new(&gaussian(problem), problem.truncation_z).expect("valid box")
}

/// Constrains every root-unstable neuron to the sign it takes at the input
/// mean, giving a fully constrained branch that contains the mean.
pub fn mean_pattern(problem: &ProblemInstance) -> ConstraintSet {
    let domain = domain(problem);
    let root = compute_linear_bounds(&problem.network, &domain.input_box, &ConstraintSet::new())
        .expect("root bounds");
    let pre = problem
        .network
        .preactivations(&problem.input_mean)
        .expect("forward pass");
    let mut constraints = ConstraintSet::new();
    for n in root.unstable_neurons(&ConstraintSet::new()) {
        let sign = if pre[n.layer][n.index] >= 0.0 {
            Sign::GeqZero
        } else {
            Sign::LtZero
        };
        constraints.insert(n, sign).expect("fresh neuron");
    }
    constraints
}
