use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("{0} is not supported for white noise")]
    Unsupported(&'static str),

    #[error("covariance matrix of size {0} is not positive definite")]
    NotPositiveDefinite(usize),

    #[error("invalid Bell mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("initial state is not entangled (N0 = {0})")]
    NotEntangled(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        domain,
    }
}
