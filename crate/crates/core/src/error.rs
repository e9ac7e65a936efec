use thiserror::Error;

/// Errors raised by the exact and numeric layers of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("dimension {dim} is not divisible by factor dimension {factor}")]
    NonDivisible { dim: usize, factor: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("cannot parse rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("Stirling index out of range: n = {n}, k = {k}")]
    StirlingRange { n: i64, k: i64 },

    #[error("cannot multiply oscillator elements with different orderings")]
    MixedOrdering,

    #[error("unknown relation {0:?}")]
    UnknownRelation(String),

    #[error("scale limit exceeded: {0}")]
    ScaleLimit(String),

    #[error("divergent sum: {0}")]
    Divergent(String),

    #[error("pole encountered: {0}")]
    Pole(String),

    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("block structure violated at ({row}, {col}): magnon {row_magnon} vs {col_magnon}")]
    BlockViolation {
        row: usize,
        col: usize,
        row_magnon: usize,
        col_magnon: usize,
    },

    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
