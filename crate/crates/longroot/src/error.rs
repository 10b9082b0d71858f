use thiserror::Error;

/// Errors surfaced by field construction, the matrix backend and the
/// Monte-Carlo procedures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u64),
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u64 },
    #[error("division by zero in GF(p^k)")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),
    #[error("bad group descriptor: {0}")]
    BadSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty generating set")]
    EmptyGeneratingSet,
    #[error("element is neither an involution nor a pseudo-involution")]
    NotAnInvolution,
    #[error("subgroup has no central involution")]
    NoCentralInvolution,
    #[error("run stalled: {0}")]
    Stalled(String),
    #[error("order tests are inconsistent with the promised isomorphism type")]
    WrongGroupPromise,
    #[error("operation requires the white-box matrix backend")]
    BackendNotWhiteBox,
    #[error("parse error: {0}")]
    ParseError(String),
}
