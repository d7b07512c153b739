use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("curves or kernels live on different grids")]
    GridMismatch,

    #[error("sample too short: need T >= {required}, got T = {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("simulation diverged at step {step}")]
    Diverged { step: usize },

    #[error("{} of {n_reps} replications failed in cell {cell}", failures.len())]
    Replications {
        cell: String,
        n_reps: usize,
        failures: Vec<ReplicationFailure>,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// A replication that could not produce a test outcome.
#[derive(Debug)]
pub struct ReplicationFailure {
    pub rep: usize,
    pub error: Box<Error>,
}

impl Error {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
