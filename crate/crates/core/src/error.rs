use thiserror::Error;

/// Errors raised by node construction, interpolation and the measurement code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid degree {0}: must be at least 1")]
    InvalidDegree(usize),

    #[error("degrees ({m}, {n}) are not relatively prime (gcd = {gcd})")]
    Coprimality { m: usize, n: usize, gcd: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("quadrature did not converge: relative change {change:e} exceeds {tolerance:e} at {points} points per axis")]
    Quadrature {
        change: f64,
        tolerance: f64,
        points: usize,
    },

    #[error("capability error: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(x: f64, what: &str) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(Error::Domain(format!("{what} = {x} lies outside [-1, 1]")));
    }
    Ok(())
}
