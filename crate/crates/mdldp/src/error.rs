use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration is malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A dataset or schema file could not be turned into a dataset.
    #[error("{}: {message}", path.display())]
    Data { path: PathBuf, message: String },
    /// A library call failed; `context` names the grid point or step.
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: mdldp_core::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    pub(crate) fn core(context: impl Into<String>, source: mdldp_core::Error) -> Self {
        HarnessError::Core { context: context.into(), source }
    }

    /// Process exit status: 2 for configuration problems, 3 for anything that
    /// went wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
