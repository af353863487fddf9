use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value {value} while evaluating at {point:?}")]
    Evaluation { point: Vec<f64>, value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown test-function family `{0}`")]
    UnknownFamily(String),

    #[error("grid of {grid} points per axis aliases modes up to |k| = {kmax} (need at least {needed})")]
    Aliasing { grid: usize, kmax: usize, needed: usize },

    #[error("Jackson spec with L = {level} expects {expected} profile entries, got {got}")]
    InconsistentProfile { level: u32, expected: usize, got: usize },

    #[error("coefficient map has no mass away from k = 0; constants must be carried by the offset")]
    DegenerateTarget,

    #[error("invalid label {0}; labels must be -1 or +1")]
    InvalidLabel(f64),

    #[error("empty data set")]
    EmptyData,

    #[error("training budget exhausted after {iterations_done} iterations, before a full restart")]
    BudgetExhausted {
        iterations_done: usize,
        best: Box<crate::classification::ErmResult>,
    },

    #[error("instance too large for the exhaustive covering oracle: {0}")]
    InstanceTooLarge(String),

    #[error("no epsilon below {limit} satisfies the oracle-inequality condition (sample size too small)")]
    Unsatisfiable { limit: f64 },

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
