use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("eigenvalue {value:.6e} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },
    #[error("singular input: {0}")]
    Singular(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("eigenvalue dominance fails at index {index} (gap {gap:.3e})")]
    Dominance { index: usize, gap: f64 },
    #[error("search exhausted, best margin {best_gap:.3e}")]
    SearchExhausted { best_gap: f64 },
    #[error("invalid tolerance: {0}")]
    Tolerance(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
