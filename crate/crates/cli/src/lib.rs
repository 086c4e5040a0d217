//! Command-line front end for the ambc-noma evaluation engines.

pub mod config;
pub mod output;
pub mod runner;
pub mod sweep;
pub mod validate;

use config::ConfigError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: ambc_noma::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<ambc_noma::Error> for CliError {
    fn from(source: ambc_noma::Error) -> Self {
        CliError::Model {
            context: "model".into(),
            source,
        }
    }
}

impl CliError {
    /// Prefixes model errors with where they occurred.
    pub fn context(self, context: String) -> Self {
        match self {
            CliError::Model { source, .. } => CliError::Model { context, source },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Model {
                source: ambc_noma::Error::Invalid { .. },
                ..
            } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
