use thiserror::Error;

pub type Result<T, E = FracError> = std::result::Result<T, E>;

/// Every failure mode of the numerical library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FracError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("integrand returned a non-finite value at x = {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },

    #[error(
        "{context}: quadrature did not converge (estimate {value:e}, error estimate {error:e})"
    )]
    NonConvergence {
        context: String,
        value: f64,
        error: f64,
    },

    #[error("evolution diverged at step {step}")]
    Divergence { step: usize },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error(
        "domain too small: tail mass {tail_mass:e} beyond the grid exceeds {limit:e} ({which})"
    )]
    DomainTooSmall {
        which: &'static str,
        tail_mass: f64,
        limit: f64,
    },

    #[error("potential unbounded below on the sampled support: V({x}) = {value}")]
    UnboundedPotential { x: f64, value: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),
}

impl FracError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        FracError::Config(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        FracError::Contract(msg.into())
    }
}
