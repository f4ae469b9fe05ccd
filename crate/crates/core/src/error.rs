use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("window too small: {0}; enlarge the window half-width L")]
    WindowTooSmall(String),

    #[error("resolution exhausted at step {step}: the neighbourhood is too small for the grid")]
    ResolutionExhausted { step: usize },

    #[error("point {0} is not on the sampling grid")]
    OffGrid(f64),

    #[error("point outside the window: {0}")]
    OutsideWindow(String),

    #[error("not weakly admissible: {witness}")]
    NotWeaklyAdmissible { witness: String },

    #[error("evaluation did not converge (truncation gap {gap:.3e})")]
    EvaluationDidNotConverge { gap: f64 },

    #[error("unsupported on this backend: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
