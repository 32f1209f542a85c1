use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },

    #[error("restart file {}: {message}", path.display())]
    Restart { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] mqdx_core::error::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn restart(path: &Path, message: impl Into<String>) -> Self {
        Self::Restart {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    pub fn bad_value(key: &str, message: impl Into<String>) -> Self {
        Self::BadValue {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
