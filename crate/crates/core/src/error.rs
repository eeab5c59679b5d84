use thiserror::Error;

/// Errors raised by geometry, barrier evaluation, the grid solver and the
/// analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("evaluation on the singular set: {0}")]
    SingularSet(&'static str),

    #[error("x.Du - u = {0} is not positive")]
    NonPositiveSupport(f64),

    #[error("empty interior mask at h = {0}")]
    EmptyMask(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no convergence after {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },

    #[error("insufficient samples: {got} in window, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("nonpositive value {0} in log-log fit")]
    NonPositiveValue(f64),

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
