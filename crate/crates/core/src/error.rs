use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid sparse matrix: {0}")]
    InvalidMatrix(String),

    /// A triangular system has a zero (or sub-threshold) diagonal entry at `index` (0-based).
    #[error("singular triangular system: diagonal entry {index} is below threshold")]
    SingularSystem { index: usize },

    #[error("invalid sketch: {0}")]
    InvalidSketch(String),

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("zero pivot in incomplete factorization at row {row}")]
    ZeroPivot { row: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported Matrix Market field or format: {0}")]
    Unsupported(String),

    #[error("invalid experiment: {0}")]
    Experiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
