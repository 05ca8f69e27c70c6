use thiserror::Error;

/// Errors raised by the solvers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("profiles live on different grids")]
    GridMismatch,
    #[error("linear system is singular (zero pivot at row {row})")]
    Singular { row: usize },
    #[error("K-integration failed at x~ = {position}: {reason}")]
    Integration { position: f64, reason: String },
    #[error("tail of x~K has not saturated: {0}")]
    Extrapolation(String),
    #[error("bound violated: {0}")]
    Bound(String),
    #[error("snapshot {index} does not cross the level exactly once")]
    NonMonotone { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
