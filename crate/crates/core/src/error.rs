use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("gram matrix has odd diagonal entry at {0}")]
    OddDiagonal(usize),

    #[error("matrix is singular")]
    Singular,

    #[error("vector is zero or not primitive")]
    NotPrimitive,

    #[error("matrix is not an isometry of {0}")]
    NotIsometry(String),

    #[error("vectors live in different lattices: {0} vs {1}")]
    LatticeMismatch(String, String),

    #[error("vector has square {0}, expected 2 or -2")]
    NotRoot(String),

    #[error("discriminant group is not cyclic (orders {0:?})")]
    NotCyclic(Vec<String>),

    #[error("isometry does not fix the distinguished vector")]
    DoesNotFix,

    #[error("isometry is not in the reflection group W: {0}")]
    NotInW(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("equivariant solve did not stabilize: {0}")]
    Unstabilized(String),

    #[error("parse error: {0}")]
    Parse(String),
}
