use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime `{0}` occurs more than once")]
    DuplicatePrime(String),
    #[error("critical prime `{prime}` has order {order}, expected at least 2")]
    OrderBelowTwo { prime: String, order: u64 },
    #[error("`{0}` is not a prime integer")]
    NonPrimeInteger(String),
    #[error("symbolic and integer primes cannot be mixed")]
    MixedBackend,
    #[error("the potential is a unit")]
    UnitPotential,
    #[error("zero has no factorization")]
    Zero,
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("`{0}` does not divide the potential")]
    NotADivisor(String),
    #[error("operands live over different potentials")]
    PotentialMismatch,
    #[error("not a matrix factorization: {0}")]
    NotAFactorization(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operation requires the integer backend")]
    NotIntegerBackend,
    #[error("target of the first morphism is not the source of the second")]
    CompositionMismatch,
    #[error("coefficient cannot be reduced without residue arithmetic")]
    NonDivisorCoefficient,
    #[error("no elementary factorization has the triple (x, y, z): {0}")]
    InconsistentTriple(String),
    #[error("element `{0}` is not maximal in X*")]
    NotMaximal(String),
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
