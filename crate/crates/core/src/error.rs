use std::io;

use thiserror::Error;

pub type Result<T, E = OhhcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum OhhcError {
    #[error("OHHC dimension must be at least 1, got {0}")]
    InvalidDimension(u32),

    #[error("{what} {index} is out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("node {0:?} does not belong to this topology")]
    UnknownNode(crate::topology::NodeAddress),

    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error("input array is empty")]
    EmptyInput,

    #[error("cost model undefined for n = {n}, P = {p} (requires 1 <= P < n)")]
    UndefinedModel { n: u64, p: u64 },

    #[error("parallel cost must be positive")]
    ZeroParallelCost,

    #[error("gather plan violated: {0}")]
    PlanViolation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}
