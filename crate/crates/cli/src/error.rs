use std::path::PathBuf;

use deblur_core::DeblurError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: malformed JSON: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: DeblurError,
    },
}

impl HarnessError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for usage/config/IO problems and rejected
    /// parameters, 3 for failures inside a solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Solver {
                source:
                    DeblurError::InvalidParameter(_)
                    | DeblurError::InvalidImage(_)
                    | DeblurError::InvalidKernel(_)
                    | DeblurError::InvalidDimension(_)
                    | DeblurError::DimensionMismatch { .. },
                ..
            } => 2,
            Self::Solver { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Attaches a context string to core errors.
pub trait SolverContext<T> {
    fn context(self, context: impl Into<String>) -> Result<T>;
}

impl<T> SolverContext<T> for std::result::Result<T, DeblurError> {
    fn context(self, context: impl Into<String>) -> Result<T> {
        self.map_err(|source| HarnessError::Solver {
            context: context.into(),
            source,
        })
    }
}
