use thiserror::Error;

/// Errors raised across the solver pipeline.
///
/// The CLI maps input errors (see `is_config`) to exit code 2 and the numeric variants to
/// exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no bound mode: {0}")]
    NoMode(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse(_) | Error::Geometry(_) | Error::NoMode(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
