use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its physical domain (negative rate, zero mass, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration violates a consistency identity between redundant fields.
    #[error("inconsistent configuration: {0}")]
    Config(String),

    /// The coupled system has no stationary state at the requested operating point.
    #[error("unstable operating point: {0}")]
    Instability(String),

    /// A transfer function needed for an inversion vanishes.
    #[error("inversion singular: {0}")]
    Singular(String),

    /// An iterative solver or fit did not converge.
    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Fails with [`Error::Domain`] unless `x` is finite and strictly positive.
pub(crate) fn require_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {x}")))
    }
}

pub(crate) fn require_non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {x}")))
    }
}
