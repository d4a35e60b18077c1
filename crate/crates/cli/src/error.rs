use std::path::{Path, PathBuf};

use thiserror::Error;

/// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("invalid parameters: {0}")]
    Parameters(libration::Error),

    #[error("numerical failure: {0}")]
    Numerical(libration::Error),

    #[error("i/o error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv error on {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<libration::Error> for CliError {
    fn from(e: libration::Error) -> Self {
        use libration::Error as E;
        match e {
            E::NotARoot { .. } | E::WindowClosed { .. } | E::StepUnderflow { .. } => CliError::Numerical(e),
            _ => CliError::Parameters(e),
        }
    }
}
