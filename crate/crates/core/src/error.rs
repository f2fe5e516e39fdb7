use std::path::PathBuf;

use sparse_simplex::Status;
use thiserror::Error;

/// Every failure the library reports. [`Error::exit_code`] maps each variant
/// onto the command-line exit-code contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}: row {row}: {message}")]
    Parse { source_name: String, row: usize, message: String },
    #[error("{source_name}: {message}")]
    Schema { source_name: String, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("cannot resample from {from} min to {to} min")]
    Resample { from: u32, to: u32 },
    #[error("profiles are not aligned: {0}")]
    Alignment(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("degenerate clustering: {0}")]
    Degenerate(String),
    #[error("missing coverage: {0}")]
    Coverage(String),
    #[error("price fit failed: {0}")]
    Fit(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("optimization {status}: {diagnosis}")]
    Optimization { status: Status, diagnosis: String },
}

impl Error {
    /// 2 for input and schema problems, 3 for modeling and fitting, 4 for
    /// optimization failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Schema { .. }
            | Error::Validation(_)
            | Error::Resample { .. }
            | Error::Io { .. }
            | Error::Config(_) => 2,
            Error::Alignment(_) | Error::Degenerate(_) | Error::Coverage(_) | Error::Fit(_) | Error::Model(_) => 3,
            Error::Optimization { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
