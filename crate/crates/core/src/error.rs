use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point outside the open unit ball: {what} has norm {norm}")]
    OutsideBall { what: &'static str, norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has numerical rank {rank} < {k}; QR factor is undefined")]
    RankDeficient { rank: usize, k: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("schedule violates the convergence hypotheses at n = {n}: {condition}")]
    HypothesisViolated { n: usize, condition: &'static str },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on symbol {symbol:?}")]
    SelfLoop { line: usize, symbol: String },

    #[error("noun {0:?} is related to every other noun; no negatives to sample")]
    NoNegatives(String),

    #[error("missing embedding for noun {0:?}")]
    MissingEmbedding(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("empty trace")]
    EmptyTrace,

    #[error("trace lacks per-component records required by {0}")]
    MissingComponentRecords(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
