//! Probabilistic verification of ReLU networks under Gaussian input noise.
//!
//! Given a scalar network `f` and `X ~ N(mean, cov)`, decides whether
//! `P[f(X) > 0] >= eta` by branch and bound over ReLU sign splits. Each
//! branch is bounded with linear relaxations whose induced polyhedral events
//! are measured by Monte Carlo on shared samples.

pub mod bab;
pub mod error;
pub mod lirpa;
pub mod model;
pub mod oracle;
pub mod prob;
pub mod split;
pub mod toy;

pub use bab::{
    bound_global_probability, evaluate_branch, evaluate_marked_branch, split_branch, verify,
    verify_no_split, verify_with_observer, Branch, BranchPool, Budget, EngineEvent, GlobalBounds,
    StopReason, Verdict, VerificationReport,
};
pub use error::{Error, Result};
pub use lirpa::{
    compute_linear_bounds, relax_relu, ConstraintSet, InputBox, LinearBoundsSet,
    LinearFunctionBundle, NeuronId, ReluRelaxation, Sign,
};
pub use model::{
    fold_spec, load_model, parse_model, save_model, AffineLayer, HalfSpaceSpec, Network,
    ProblemFile, ProblemInstance,
};
pub use oracle::{
    enumerate_patterns, oracle_probability, oracle_verdict, OracleEstimate, OracleVerdict,
};
pub use prob::{
    bernstein_confidence, Covariance, GaussianInput, LinearEvent, ProbEstimate, TruncationDomain,
    TARGET_CONFIDENCE,
};
pub use split::{SplitChoice, Strategy, DEFAULT_TAU};
pub use toy::ToyConfig;
