use thiserror::Error;

/// Errors produced anywhere in the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mixture specification: {0}")]
    InvalidSpec(String),

    #[error("at least two samples are required, got {0}")]
    TooFewSamples(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("top eigenvalue is numerically multiple")]
    DegenerateSpectrum,

    #[error("exact enumeration is limited to n <= {max}, got n = {n}")]
    TooLargeForEnumeration { n: usize, max: usize },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
