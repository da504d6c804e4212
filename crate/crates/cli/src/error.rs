use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerical(#[from] nonlocal_core::Error),
}

impl CliError {
    /// Config, I/O and numerical failures all end the run before a verdict exists.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
