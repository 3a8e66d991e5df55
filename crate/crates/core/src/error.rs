use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    #[error("root finder did not converge: {0}")]
    Convergence(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("quadrature tolerance not met: estimate {estimate:.3e}, error {error:.3e}, requested {requested:.3e}")]
    Tolerance {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    #[error("point coincides with the origin")]
    Origin,

    #[error("singular evaluation point: {0}")]
    Singularity(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
