use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{f} exceeds the configured limit of {limit} elements")]
    FieldTooLarge { p: u64, f: u32, limit: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("element is not a square")]
    NotASquare,
    #[error("q = {0} is too small (need q > 3)")]
    QTooSmall(u32),
    #[error("q = {q} is not congruent to {expected} mod 4")]
    WrongCongruence { q: u32, expected: u32 },
    #[error("matrix is not an involution representative (trace 0, det 1)")]
    NotAnInvolution,
    #[error("the two vertices coincide")]
    SameVertex,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("matrix is not a vertex of the graph")]
    UnknownVertex,
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is a perfect square; the point-count bound does not apply")]
    PerfectSquare,
    #[error("automorphism search timed out after {0:?}")]
    Timeout(Duration),
    #[error("permutation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("seed permutation is not a graph automorphism")]
    BadSeed,
    #[error("invariant violated: {0}")]
    Invariant(String),
}
