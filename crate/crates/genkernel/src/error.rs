use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument envelope exceeded: |z| = {modulus} > {limit}")]
    Envelope { modulus: f64, limit: f64 },
    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },
    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e})")]
    Quadrature { estimate: f64, tolerance: f64 },
    #[error("degenerate pole: {0}")]
    DegeneratePole(String),
    #[error("improper rational function: numerator degree {numerator} >= denominator degree {denominator}")]
    Improper { numerator: usize, denominator: usize },
    #[error("branch ambiguity: Re s = {re_s} is below the required {required}")]
    Branch { re_s: f64, required: f64 },
    #[error("near singularity: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
