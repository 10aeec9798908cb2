use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("argument outside the domain of convergence: {0}")]
    Domain(String),

    #[error("moment integral diverges at order n = {order}")]
    Divergence { order: usize },

    #[error("quadrature did not converge: error estimate {achieved_error:.3e} after {intervals} intervals")]
    QuadratureFailure {
        achieved_error: f64,
        intervals: usize,
    },

    #[error("series truncation failed: tail bound {tail_bound:.3e} after {terms} terms")]
    TruncationFailure { terms: usize, tail_bound: f64 },

    #[error(
        "supremum attained on the search boundary (radius {radius}); enlarge the search radius"
    )]
    InconclusiveSupremum { radius: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::ParameterDomain(msg.into()))
}
