use thiserror::Error;

use crate::process::BoundaryMode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation requires {expected} mode, got {found}")]
    WrongMode {
        expected: BoundaryMode,
        found: BoundaryMode,
    },

    #[error("not a probability generating function: {0}")]
    NotAPgf(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("gap table budget of {budget} coefficients exhausted at (l, r, k) = ({}, {}, {})", frontier.0, frontier.1, frontier.2)]
    TableBudget {
        budget: usize,
        frontier: (usize, usize, usize),
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors raised by size/memory guards rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::TableBudget { .. })
    }
}
