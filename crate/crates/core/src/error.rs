use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solvers, generators and file readers.
#[derive(Debug, Error)]
pub enum IrmError {
    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("degenerate basis: no usable search direction")]
    DegenerateBasis,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) has no matching transpose value")]
    NotSymmetric { row: usize, col: usize },

    #[error("singular perturbation: closed-form denominator vanishes at delta={delta}, kappa={kappa}")]
    SingularPerturbation { delta: f64, kappa: f64 },

    #[error("missing {0} cache: state was not initialised for the recursive update")]
    MissingCache(&'static str),

    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, IrmError>;

impl IrmError {
    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        IrmError::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IrmError::Io {
            path: path.into(),
            source,
        }
    }
}
