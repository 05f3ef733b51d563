use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", .path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", .path.display())]
    Data {
        path: PathBuf,
        #[source]
        source: trendfolio_core::Error,
    },

    #[error(transparent)]
    Engine(#[from] trendfolio_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, source: trendfolio_core::Error) -> Self {
        CliError::Data {
            path: path.into(),
            source,
        }
    }
}
