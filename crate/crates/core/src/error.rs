use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric: |m[{row},{col}] - m[{col},{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (worst residual {worst_residual:e})")]
    NotConverged { sweeps: usize, worst_residual: f64 },

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("zero matrix: {0}")]
    ZeroMatrix(&'static str),

    #[error("insufficient data: {0}")]
    Insufficient(String),
}

/// Coarse classification used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidArgument(_) => ErrorCategory::Usage,
            Error::Io { .. } | Error::Parse(_) | Error::Validation(_) => ErrorCategory::Data,
            Error::NotSymmetric { .. }
            | Error::NotConverged { .. }
            | Error::ZeroVariance(_)
            | Error::ZeroMatrix(_)
            | Error::Insufficient(_) => ErrorCategory::Numerical,
        }
    }
}
