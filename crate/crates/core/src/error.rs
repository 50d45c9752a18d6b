use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A law, prior or schedule was constructed with invalid parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A simulation loop ran out of attempts.
    #[error("simulation budget exhausted: {0}")]
    Budget(String),

    /// A summary or metric input had a zero or negative component.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Mismatched inputs (dimensions, grids, kinds).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("state {state} exceeds the supported bound {bound}")]
    UnsupportedSize { state: u64, bound: u64 },

    #[error("no particle was accepted")]
    EmptyPopulation,

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// Malformed file contents.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateSample(msg.into())
    }
}
