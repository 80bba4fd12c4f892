use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("degree {degree} out of range (max {max})")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("argument {value} outside [-{d}, {d}]")]
    ArgumentOutOfRange { value: f64, d: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("kernel violates level-{ell} genericity: mu_{ell} = {mu} <= 0")]
    DegenerateLevel { ell: usize, mu: f64 },

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TailBoundExceeded { bound: f64, tolerance: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
