use thiserror::Error;

/// Errors produced by the blurring and deblurring routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeblurError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid tolerance {tol}: must lie in (0, {sigma_max})")]
    InvalidTolerance { tol: f64, sigma_max: f64 },

    #[error("rank-deficient truncation: sigma[{index}] = {sigma:e} is zero at m = {m}")]
    RankDeficientTruncation { m: usize, index: usize, sigma: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("solver run has no recorded trace")]
    NoTrace,
}

pub type Result<T> = std::result::Result<T, DeblurError>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(DeblurError::DimensionMismatch { expected, actual })
    }
}
