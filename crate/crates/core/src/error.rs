use thiserror::Error;

/// Errors raised by the numeric and state layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dims(String),
    #[error("matrix is not Hermitian (deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("invalid weights: {0}")]
    Weight(String),
    #[error("invalid basis: {0}")]
    Basis(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
