use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsolvable problem: {0}")]
    Unsolvable(String),

    #[error(
        "solver did not converge after {iterations} iterations (KKT violation {violation:.3e})"
    )]
    Convergence { iterations: usize, violation: f64 },

    #[error("pair ({first}, {second}): {source}")]
    Pair {
        first: String,
        second: String,
        #[source]
        source: Box<Error>,
    },

    #[error("member `{name}`: {source}")]
    Member {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("chance agreement is total (degenerate marginals); kappa is undefined")]
    DegenerateMarginals,

    #[error("every grid cell failed during cross-validation")]
    SearchFailed,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed model file at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
