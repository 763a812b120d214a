use thiserror::Error;

/// Errors shared across the crate's subsystems.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("line {line}: not an integer: {token:?}")]
    NonInteger { line: usize, token: String },

    #[error("line {line}: value {value} out of range 0..{n}")]
    OutOfRange { line: usize, value: i64, n: usize },

    #[error("line {line}: duplicate value {value}")]
    DuplicateValue { line: usize, value: usize },

    #[error("permutation must have at least one element")]
    Empty,

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("block size {block} does not divide {n}")]
    BlockDoesNotDivide { block: usize, n: usize },

    #[error("block count {count} is not a power of two")]
    BlockCountNotPowerOfTwo { count: usize },

    #[error("keys must be strictly increasing: {prev} then {next}")]
    UnsortedKeys { prev: usize, next: usize },

    #[error("key sets overlap or are out of order: left max {left_max}, right min {right_min}")]
    KeyOrderOverlap { left_max: usize, right_min: usize },

    #[error("label sequence is empty")]
    EmptyLabels,

    #[error("vertex ({level},{index}) is not an internal vertex")]
    NotInternalVertex { level: u32, index: u64 },

    #[error("column ranges {a:?} and {b:?} are not adjacent (left before right)")]
    ColumnsNotAdjacent {
        a: (usize, usize),
        b: (usize, usize),
    },

    #[error("accessed keys miss block boundary {key}")]
    MissingBoundary { key: usize },

    #[error("trace does not match the permutation: {0}")]
    TraceMismatch(String),

    #[error("invalid point set line {line}: {reason}")]
    BadPointLine { line: usize, reason: String },

    #[error("invalid tree shape: {0}")]
    BadTreeShape(String),

    #[error("invalid report row {line}: {reason}")]
    BadReportRow { line: usize, reason: String },
}
