use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("numerical failure at node {node}: {msg}")]
    Numerical { node: usize, msg: String },

    #[error("singular tridiagonal system at row {0}")]
    Singular(usize),

    #[error("vacuum front left the domain: R = {0}")]
    Tracking(f64),

    #[error("free boundary collapsed: a = {0}")]
    GeometryCollapse(f64),

    #[error("time step collapsed to {0:e}")]
    DtCollapse(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("insufficient history: need at least {0} records")]
    InsufficientHistory(usize),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
