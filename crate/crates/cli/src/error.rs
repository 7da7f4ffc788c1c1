use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv {path}: {reason}")]
    Csv { path: String, reason: String },
    #[error(transparent)]
    Core(#[from] blpp_core::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the invocation or config, 1 for
    /// failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Csv { .. } => 2,
            // parameters the run cannot honour, e.g. a window the domain
            // does not reach at this n
            CliError::Core(
                blpp_core::Error::Config(_)
                | blpp_core::Error::Precondition(_)
                | blpp_core::Error::Coverage(_)
                | blpp_core::Error::Input(_)
                | blpp_core::Error::NoReward,
            ) => 2,
            CliError::Io { .. } | CliError::Core(_) => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
