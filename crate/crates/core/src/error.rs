use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree {0} is not supported (1 <= r <= 3)")]
    UnsupportedDegree(u32),
    #[error("modulus {0:?} is not a monic irreducible polynomial of the requested degree")]
    ReducibleModulus(Vec<u32>),
    #[error("{what}: size {size} exceeds guardrail {limit} (use --force to override)")]
    TooLarge { what: String, size: u128, limit: u128 },
    #[error("q = {q} is not congruent to 3 mod 4")]
    WrongResidue { q: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("segment has zero norm")]
    DegenerateSegment,
    #[error("matrix is not in SO(2,q) \\ {{I}}")]
    NotInDomain,
    #[error("motion {0} is not in SF'(2,q)")]
    NotOriented(String),
    #[error("closed-form line {closed} disagrees with definitional line {definitional}")]
    FormMismatch { definitional: String, closed: String },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
