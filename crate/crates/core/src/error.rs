use thiserror::Error;

use crate::subsolver::SubSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The point is on or outside the boundary of the barrier domain.
    #[error("point is not in the interior of the domain: {0}")]
    Domain(String),

    #[error("ill-conditioned: {0}")]
    Conditioning(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    /// The inner solver hit its iteration cap. Carries the best iterate and
    /// its gap certificate.
    #[error("subsolver failed after {} iterations (gap bound {:.3e})", .0.iters, .0.gap_bound)]
    SubsolverFailure(Box<SubSolution>),

    #[error("initialization failed: {0}")]
    Initialization(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
