use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("missing artifact {}: run `lyricscope {stage}` first", path.display())]
    MissingArtifact { path: PathBuf, stage: &'static str },

    #[error("artifact directory {} already exists; pass --force to replace it", .0.display())]
    ArtifactExists(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Module(#[from] lyricscope::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub const USAGE: i32 = 2;

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Module(lyricscope::Error::Config(_)) => 3,
            CliError::MissingArtifact { .. } => 4,
            CliError::Io { .. } | CliError::Module(_) => 5,
            CliError::ArtifactExists(_) => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
