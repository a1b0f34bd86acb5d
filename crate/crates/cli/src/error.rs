use std::path::PathBuf;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap: {0}")]
    Cap(String),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Numerics(qdisc_core::Error),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input { .. } => 2,
            CliError::Cap(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Io { .. } | CliError::Numerics(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<qdisc_core::Error> for CliError {
    fn from(e: qdisc_core::Error) -> Self {
        use qdisc_core::Error as E;
        match e {
            E::TooLarge { .. } => CliError::Cap(e.to_string()),
            E::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            E::InvalidArgument(_) | E::Sites(_) => CliError::Config(e.to_string()),
            other => CliError::Numerics(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
