use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("input of {got} points exceeds the limit of {limit}")]
    TooManyPoints { limit: usize, got: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid step distribution: {0}")]
    InvalidStep(String),

    #[error("step law {0} has no Lebesgue density; the n-fold CDF profile requires one")]
    NoDensity(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
