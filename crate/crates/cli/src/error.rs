use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Compute(#[from] bdop_core::Error),

    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn missing(key: &str, experiment: &str) -> Self {
        CliError::Config {
            line: None,
            msg: format!("'{key}' is required for {experiment}"),
        }
    }
}
