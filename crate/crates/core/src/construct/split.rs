use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::ConstructError;
use crate::numth::{self, Factorization};

/// N = R₁·R₂·M₁·M₂: primes of Δ go to R, the rest to M; odd exponents to the
/// subscript-1 part, even exponents to the subscript-2 part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSplit {
    pub level: BigInt,
    pub disc: BigInt,
    pub r1: BTreeMap<BigInt, u32>,
    pub r2: BTreeMap<BigInt, u32>,
    pub m1: BTreeMap<BigInt, u32>,
    pub m2: BTreeMap<BigInt, u32>,
    level_factors: Factorization,
    disc_primes: Vec<BigInt>,
}

fn two() -> BigInt {
    BigInt::from(2)
}

/// Checks that Δ is a definite discriminant and that Δ | N, then splits N.
pub fn split_level(level: &BigInt, disc: &BigInt) -> Result<LevelSplit, ConstructError> {
    if level <= &BigInt::one() {
        return Err(ConstructError::Admissibility(format!("level {level} must exceed 1")));
    }
    if disc < &two() {
        return Err(ConstructError::InvalidDiscriminant(format!("{disc} is not a product of primes")));
    }
    let disc_factors = numth::factorize(disc)?;
    if !disc_factors.is_squarefree() {
        return Err(ConstructError::InvalidDiscriminant(format!("{disc} = {disc_factors} is not squarefree")));
    }
    if disc_factors.num_primes() % 2 == 0 {
        return Err(ConstructError::InvalidDiscriminant(format!(
            "{disc} = {disc_factors} has an even number of prime factors, so no definite algebra has it"
        )));
    }
    if !level.is_multiple_of(disc) {
        return Err(ConstructError::Admissibility(format!("discriminant {disc} does not divide level {level}")));
    }
    let level_factors = numth::factorize(level)?;
    let disc_primes: Vec<BigInt> = disc_factors.primes().cloned().collect();
    let (mut r1, mut r2, mut m1, mut m2) = Default::default();
    for (p, e) in level_factors.factors() {
        let bucket: &mut BTreeMap<BigInt, u32> = match (disc_primes.contains(p), e % 2 == 1) {
            (true, true) => &mut r1,
            (true, false) => &mut r2,
            (false, true) => &mut m1,
            (false, false) => &mut m2,
        };
        bucket.insert(p.clone(), *e);
    }
    Ok(LevelSplit { level: level.clone(), disc: disc.clone(), r1, r2, m1, m2, level_factors, disc_primes })
}

impl LevelSplit {
    pub fn level_factors(&self) -> &Factorization {
        &self.level_factors
    }

    pub fn disc_primes(&self) -> &[BigInt] {
        &self.disc_primes
    }

    pub fn exponent(&self, p: &BigInt) -> u32 {
        self.level_factors.exponent(p)
    }

    pub fn v2(&self) -> u32 {
        self.exponent(&two())
    }

    pub fn disc_is_even(&self) -> bool {
        self.disc.is_even()
    }

    pub fn is_disc_prime(&self, p: &BigInt) -> bool {
        self.disc_primes.contains(p)
    }

    /// Primes of R₁ ∪ R₂ ∪ M₁, ascending.
    pub fn rm1_primes(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self.r1.keys().chain(self.r2.keys()).chain(self.m1.keys()).cloned().collect();
        out.sort();
        out
    }

    /// ∏ p over R ∪ M₁.
    pub fn rm1_product(&self) -> BigInt {
        self.rm1_primes().iter().product()
    }

    /// ∏ p over R ∪ M₁, leaving out 2.
    pub fn rm1_odd_product(&self) -> BigInt {
        self.rm1_primes().iter().filter(|p| **p != two()).product()
    }

    /// ∏ p over R₂.
    pub fn r2_product(&self) -> BigInt {
        self.r2.keys().product()
    }

    /// ∏ p over R₂, leaving out 2.
    pub fn r2_odd_product(&self) -> BigInt {
        self.r2.keys().filter(|p| **p != two()).product()
    }
}

impl fmt::Display for LevelSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |m: &BTreeMap<BigInt, u32>| {
            let parts: Vec<String> = m.iter().map(|(p, e)| format!("{p}^{e}")).collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("·")
            }
        };
        write!(f, "R1={} R2={} M1={} M2={}", show(&self.r1), show(&self.r2), show(&self.m1), show(&self.m2))
    }
}
