use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("field mismatch between operands")]
    FieldMismatch,

    #[error("zero-norm vector where a nonzero one is required ({0})")]
    ZeroNorm(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("measurement {index} has negative squared magnitude {value:e}")]
    NegativeMagnitude { index: usize, value: f64 },

    #[error("magnitude b[{index}] is zero; the basis pursuit route needs an invertible diag(b), use the primal route")]
    SingularMagnitudes { index: usize },

    #[error("all spectral weights vanished after truncation (factor {0})")]
    DegenerateTruncation(f64),

    #[error("parameter regime exceeded: {0}")]
    Regime(String),

    #[error("instance format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
