use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tumorseg::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no case ids shared by {pred} and {gt}")]
    NoPairsFound { pred: PathBuf, gt: PathBuf },

    #[error("case id {id:?} matched by both {first} and {second}")]
    DuplicateCaseId {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },

    #[error("bad case-id pattern: {0}")]
    Pattern(#[from] regex::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 for usage and configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Pattern(_) => 2,
            Self::Core(tumorseg::Error::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }
}
