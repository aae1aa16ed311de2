use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rft_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed rfgrid or config content.
    #[error("{0}")]
    Format(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for IO and data errors, 2 for a regime violation, 64 for bad usage
    /// or parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(rft_core::Error::RegimeViolation { .. }) => 2,
            Error::Core(_) | Error::Usage(_) => 64,
            Error::Io { .. } | Error::Format(_) | Error::Csv(_) | Error::ThreadPool(_) => 1,
        }
    }
}
