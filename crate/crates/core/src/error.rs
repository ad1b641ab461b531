use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("characteristic 2 is not supported: the Jordan product needs 1/2")]
    CharTwo,
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("a prime field needs a modulus")]
    MissingModulus,
    #[error("zero denominator in scalar literal")]
    ZeroDenominator,
    #[error("malformed scalar literal {0:?}")]
    MalformedLiteral(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field is not finite")]
    NotFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("operation requires the field {required}")]
    WrongField { required: &'static str },
    #[error("matrix is not rank-one square-zero")]
    NotRankOneSquareZero,
    #[error("bad basis indices: {0}")]
    BadIndices(String),
    #[error("operator does not have determinant one")]
    NotSL,
    #[error("parameter {0} lies in the exceptional set")]
    ExceptionalParameter(String),
    #[error("determinant target is zero")]
    ZeroDeterminant,
    #[error("operator is invertible")]
    NotSingular,
    #[error("operator dimension {0} is not a perfect square")]
    DimensionNotSquare(usize),
    #[error("matrix is not triangular")]
    NotTriangular,
    #[error("character index is trivial")]
    TrivialCharacter,
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("determinant {0} not reachable from the generator set")]
    DeterminantUnreachable(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
