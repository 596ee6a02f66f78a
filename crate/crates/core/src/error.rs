//! Error type shared by the whole crate.

/// Anything that can go wrong while building problems or running engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid feasible set: {0}")]
    InvalidSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mixing model: {0}")]
    InvalidModel(String),

    #[error("matrix is not doubly stochastic: {0}")]
    NotDoublyStochastic(String),

    #[error(
        "primal/dual pair out of sync: |x - mirror(-z)| = {gap:e} exceeds tolerance {tol:e}"
    )]
    InconsistentPair { gap: f64, tol: f64 },

    #[error("non-finite value in {context} at round {round}")]
    NonFinite { context: &'static str, round: usize },

    #[error("step size certification failed: {0}")]
    Infeasible(String),

    #[error("trace i/o: {0}")]
    TraceIo(#[from] std::io::Error),

    #[error("trace format: {0}")]
    TraceFormat(String),

    #[error("instance serialization: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
