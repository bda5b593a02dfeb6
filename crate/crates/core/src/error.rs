use thiserror::Error;

/// Errors raised by law constructors, operator builders and bound evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("not a probability vector: {0}")]
    NotNormalized(String),

    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("zero mass at interior index {0}")]
    ZeroInteriorMass(usize),

    #[error("series did not converge after {0} terms")]
    NoConvergence(usize),

    #[error("perturbation constants invalid: omega1*omega2 = {product} >= gamma = {gamma}")]
    InvalidPerturbation { product: f64, gamma: f64 },

    #[error("model too large: {0}")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// Checks `0 < p < 1`.
pub(crate) fn check_open_unit(name: &'static str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, p, "must lie in (0, 1)"))
    }
}

pub(crate) fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, x, "must be positive and finite"))
    }
}
