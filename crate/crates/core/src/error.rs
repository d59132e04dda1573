use thiserror::Error;

/// Errors produced by the verifier library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid covariance: {0}")]
    Covariance(String),

    #[error("unknown neuron: layer {layer}, index {index}")]
    UnknownNeuron { layer: usize, index: usize },

    #[error("invalid relaxation interval: lower {lower} exceeds upper {upper}")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("no unstable neuron to split on")]
    NoUnstableNeuron,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("engine invariant violated: {0}")]
    Invariant(String),

    #[error("malformed file {path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
