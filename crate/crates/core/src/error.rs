use thiserror::Error;

/// Errors raised anywhere in the classification engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field order {0}")]
    UnsupportedOrder(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid element code {code} for GF({q})")]
    InvalidCode { code: u32, q: u32 },
    #[error("zero vector has no projective point")]
    ZeroVector,
    #[error("zero matrix has no projective point")]
    ZeroMatrix,
    #[error("index {index} out of range (point count {count})")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("memory budget exceeded: {required} bytes required, budget is {budget} bytes")]
    MemoryBudgetExceeded { required: u64, budget: u64 },
    #[error("group order {order} exceeds oracle bound {bound}")]
    OracleBoundExceeded { order: u64, bound: u64 },
    #[error("expected {expected} rank-4 point orbits, found {found}")]
    UnexpectedOrbitCount { expected: usize, found: usize },
    #[error("candidate set is not closed under the group action")]
    NotClosed,
    #[error("eta is a square in the quadratic extension")]
    EtaIsSquare,
    #[error("construction requires odd characteristic")]
    EvenCharacteristic,
    #[error("algebra is not commutative")]
    NotCommutative,
    #[error("algebra has zero divisors")]
    NotPresemifield,
    #[error("constructed solid contains a singular matrix")]
    SolidNotSemifield,
    #[error("subspace contains a point of rank {rank}")]
    NotSemifield { rank: u8 },
    #[error("no classified orbit matches: {0}")]
    NotFound(String),
    #[error("field mismatch: expected q={expected}, found q={found}")]
    FieldMismatch { expected: u32, found: u32 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("time limit reached with {completed_level} levels complete")]
    Timeout { completed_level: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
