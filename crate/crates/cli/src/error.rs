use thiserror::Error;

/// Failures surfaced by a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error("{0}")]
    Dimension(String),

    #[error("initial and target states are the same ray")]
    CoincidentRays,

    #[error(transparent)]
    Core(brachistochrone::Error),
}

impl From<brachistochrone::Error> for CliError {
    fn from(e: brachistochrone::Error) -> Self {
        match e {
            brachistochrone::Error::DimensionMismatch { .. } => Self::Dimension(e.to_string()),
            other => Self::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Parse { .. } | Self::Invalid(_) | Self::Core(_) => 2,
            Self::Dimension(_) => 3,
            Self::CoincidentRays => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
