use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] echo_chamber::Error),
    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
    #[error("{0} figure(s) failed")]
    FiguresFailed(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 verification failure, 2 configuration or I/O, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        use echo_chamber::Error as E;
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Model(E::InvalidParams(_) | E::InvalidConfig(_)) => 2,
            CliError::Model(_) | CliError::FiguresFailed(_) => 3,
        }
    }
}
