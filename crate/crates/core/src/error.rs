use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    /// The invariant form is degenerate, so the algebra is not semisimple.
    #[error("semisimplicity violated: {0}")]
    NotSemisimple(String),

    #[error("invalid structure constants: {0}")]
    InvalidStructure(String),

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("point ({z}, {zbar}) lies outside the field domain")]
    OutsideDomain { z: f64, zbar: f64 },

    /// The induced metric (or the normal pairing) is degenerate at the point.
    #[error("degenerate point ({z}, {zbar}): {reason}")]
    DegeneratePoint { z: f64, zbar: f64, reason: String },

    #[error("unknown {kind} `{name}`")]
    Lookup { kind: &'static str, name: String },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
