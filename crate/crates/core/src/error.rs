use num_bigint::BigInt;
use thiserror::Error;

use crate::construct::Certificate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumthError {
    #[error("argument must be nonzero")]
    Zero,
    #[error("{0} is not a positive integer")]
    NonPositive(BigInt),
    #[error("modulus {0} is not positive")]
    NonPositiveModulus(BigInt),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("the Legendre symbol needs an odd prime")]
    EvenPrime,
    #[error("{a} is not a quadratic residue mod {p}")]
    NonResidue { a: BigInt, p: BigInt },
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(BigInt, BigInt),
    #[error("the class {0} contains no units")]
    Unsolvable(String),
    #[error("no admissible prime in {system} within {bound} steps")]
    SearchBoundExceeded { system: String, bound: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuatError {
    #[error("algebra parameters must be nonzero")]
    ZeroParameter,
    #[error("({a}, {b}) is not definite: both parameters must be negative")]
    Indefinite { a: BigInt, b: BigInt },
    #[error(transparent)]
    Numth(#[from] NumthError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("generators span rank {0}, expected 4")]
    RankDeficient(usize),
    #[error("not an order: {0}")]
    NotAnOrder(String),
    #[error("|det| of the trace pairing is {0}, not a perfect square")]
    NonSquareDiscriminant(BigInt),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("inadmissible level: {0}")]
    Admissibility(String),
    #[error("invalid discriminant: {0}")]
    InvalidDiscriminant(String),
    #[error("not constructible: {0}")]
    NotConstructible(Certificate),
    #[error("invalid override: {0}")]
    InvalidOverride(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Numth(#[from] NumthError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
