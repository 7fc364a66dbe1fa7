use thiserror::Error;

/// Errors raised by the geometry and dynamics routines.
///
/// `Inconclusive` is not a failure: it marks a finite-horizon surrogate that
/// could not decide a limit statement either way.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the domain of the {space}: {detail}")]
    Domain { space: &'static str, detail: String },
    #[error("vertices {from} and {to} are not connected")]
    Unreachable { from: usize, to: usize },
    #[error("{operation} is not supported on the {space}")]
    Capability { operation: &'static str, space: &'static str },
    #[error("{what} did not converge: {detail}")]
    Convergence { what: &'static str, detail: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("map is not non-expanding: {0}")]
    MapValidation(String),
    #[error("preimage solver failed with residual {residual:e}")]
    Solver { residual: f64 },
    #[error("sampler starved: {0}")]
    Sampling(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::Inconclusive(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
