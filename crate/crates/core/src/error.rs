use thiserror::Error;

/// Errors raised by the simulator and the bound calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("adversary lacks required capability: {0}")]
    Capability(&'static str),

    /// The parameters fall outside the region where the bound is defined.
    #[error("infeasible parameters: requires {condition}")]
    Infeasible { condition: &'static str },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
