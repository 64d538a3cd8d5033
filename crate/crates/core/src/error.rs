use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0}")]
    NotStochastic(String),

    #[error("empty support")]
    EmptySupport,

    #[error("matrix not irreducible")]
    NotIrreducible,

    #[error("matrix primitive")]
    Primitive,

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("too many cycles: more than {0}")]
    TooManyCycles(usize),

    #[error("w-order requires exact mode")]
    RequiresExact,

    #[error("invalid weight vector: {0}")]
    InvalidWeight(String),

    #[error("cycle not w-holonomic: {0}")]
    NotHolonomic(String),

    #[error("not an exhaustive closed walk: {0}")]
    NotExhaustive(String),

    #[error("contraction violated: {0}")]
    ContractionViolated(String),

    #[error("permutation group exceeds cap of {cap} elements ({generators} generators)")]
    GroupCapExceeded { cap: usize, generators: usize },

    #[error("infeasible fixture parameters: {0}")]
    InfeasibleFixture(String),

    #[error("parse error: {0}")]
    Parse(String),
}
