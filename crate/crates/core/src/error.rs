use thiserror::Error;

/// Errors raised by the algebraic routines.
///
/// Mathematical failures that are the *answer* to a question (an algebra that
/// is not KV, a cochain that is not a cocycle) are reported through return
/// values with witnesses, not through this type. `Error` is for misuse:
/// shape mismatches, violated preconditions and resource limits.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degree {degree}: cochain space needs {cells} cells, over the budget of {budget}")]
    Budget {
        degree: usize,
        cells: u128,
        budget: u128,
    },

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
