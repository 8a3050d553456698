use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("{what} exceeded the cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    /// An equation the theory guarantees to be solvable had no solution.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
