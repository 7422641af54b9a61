use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("{0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Malformed or inconsistent user input (weights, matrices, grids).
    #[error("{0}")]
    InvalidInput(String),

    /// Rejection sampling of all-zero masks would not terminate in practice.
    #[error("rejection sampling infeasible: P(no site reports) = {p_empty:.6} exceeds 0.999")]
    Infeasible { p_empty: f64 },

    /// Exact arithmetic would overflow its fixed-width representation.
    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag used by the CLI's one-line error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DimensionMismatch { .. } => "dimension",
            Error::InvalidInput(_) => "invalid-input",
            Error::Infeasible { .. } => "infeasible",
            Error::Overflow(_) => "overflow",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit status: 1 for bad input, 2 for domain or numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::Io { .. } => 1,
            Error::Domain(_) | Error::Infeasible { .. } | Error::Overflow(_) => 2,
        }
    }
}
