use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin {0}: must be a non-negative half-integer")]
    InvalidSpin(f64),
    #[error("axis ({0}, {1}, {2}) is not unit length")]
    NonUnitAxis(f64, f64, f64),
    #[error("invalid kicked top parameters: {0}")]
    InvalidParams(String),
    #[error("measurement times out of order: t_alpha = {t_alpha} must precede t_beta = {t_beta}")]
    TimeOrdering { t_alpha: usize, t_beta: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("numerical integrity failure: {0}")]
    NumericalIntegrity(String),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
}
