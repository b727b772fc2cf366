use thiserror::Error;

/// Errors surfaced by the library. Every fallible public operation returns one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("qudit index {index} out of range for {n} qudits")]
    IndexError { index: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a stabilizer group: {0}")]
    NotAStabilizerGroup(String),
    #[error("bipartition is not cleanable: {0}")]
    NotCleanable(String),
    #[error("no Pauli operator has the requested syndrome")]
    InfeasibleSyndrome,
    #[error("unsupported qudit dimension {0}: a prime dimension is required")]
    UnsupportedDimension(u32),
    #[error("erasure of {erased} qudits is not guaranteed correctable (need at least {needed} unerased)")]
    CorrectabilityNotGuaranteed { erased: usize, needed: usize },
    #[error("{erased} erasures exceed the code's budget of {limit}")]
    TooManyErasures { erased: usize, limit: usize },
    #[error("syndrome record is not fully valid")]
    InvalidSyndrome,
    #[error("generator lists span different groups")]
    BasisMismatch,
    #[error("oracle search budget exceeded: {0}")]
    OracleBudgetExceeded(String),
    #[error("missing code metadata: {0}")]
    MissingMetadata(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
