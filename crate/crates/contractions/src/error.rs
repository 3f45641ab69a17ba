use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or ill-typed document. `offset` is a byte offset into the
    /// source; `path` locates the offending value (`$` is the root).
    #[error("{source_name}: parse error at byte {offset} ({path}): {message}")]
    Parse {
        source_name: String,
        offset: usize,
        path: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}: no matrix named {name:?} (available: {available})")]
    MissingMatrix {
        source_name: String,
        name: String,
        available: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] contractions_core::Error),
}

impl CliError {
    /// Stable machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::MissingMatrix { .. } => "missing-matrix",
            CliError::Config(_) => "config",
            CliError::Core(_) => "computation",
        }
    }
}
