use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::select::{h_value, two_exponent, CaseTag, QDivides};
use super::split::LevelSplit;
use crate::error::ConstructError;
use crate::numth;
use crate::quat::QuatAlgebra;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FghValues {
    pub f: BigInt,
    pub g: BigInt,
    pub h: BigInt,
    pub epsilon: BigInt,
}

/// x and the Bézout-derived scalars built from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxValues {
    pub x: BigInt,
    pub t: BigInt,
    pub u: BigInt,
    pub z: BigInt,
    pub zprime: BigInt,
}

/// Every scalar the construction uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderRecipe {
    pub algebra: QuatAlgebra,
    pub q: BigInt,
    pub case: CaseTag,
    pub q_divides: QDivides,
    pub f: BigInt,
    pub g: BigInt,
    pub h: BigInt,
    pub epsilon: BigInt,
    pub x: BigInt,
    pub t: BigInt,
    pub u: BigInt,
    pub z: BigInt,
    pub zprime: BigInt,
}

impl OrderRecipe {
    pub fn a(&self) -> &BigInt {
        self.algebra.a()
    }

    pub fn b(&self) -> &BigInt {
        self.algebra.b()
    }

    /// The same recipe built from another square root `x` of the residue.
    pub fn with_root(&self, x: &BigInt) -> Result<OrderRecipe, ConstructError> {
        let residue = match self.q_divides {
            QDivides::B => self.a(),
            QDivides::A => self.b(),
        };
        if !(x * x - residue).is_multiple_of(&self.q) {
            return Err(ConstructError::InvalidOverride(format!("{x}² is not {residue} mod {}", self.q)));
        }
        let aux = aux_from_root(&self.q, &self.h, x)?;
        Ok(OrderRecipe { x: aux.x, t: aux.t, u: aux.u, z: aux.z, zprime: aux.zprime, ..self.clone() })
    }

    pub fn a_is_one_mod_four(&self) -> bool {
        self.a().mod_floor(&BigInt::from(4)).is_one()
    }
}

fn pow(p: &BigInt, e: u32) -> BigInt {
    num_traits::pow(p.clone(), e as usize)
}

/// f, g, h and ε for the chosen (a, b).
///
/// Odd primes: R₁ contributes p^((v−1)/2) and R₂ p^(v/2−1) to f; M₁ contributes
/// p^((v−1)/2) to g; M₂ contributes p^(v/2) to f when split in ℚ(√a) and to g
/// when inert. The power of 2 is whatever makes the index formula hit v₂(N);
/// it joins f (and is ε) at a ramified 2, g at 2 ∈ M₁, and follows the
/// splitting of 2 at 2 ∈ M₂.
pub fn compute_fgh(split: &LevelSplit, a: &BigInt, b: &BigInt) -> Result<FghValues, ConstructError> {
    let two = BigInt::from(2);
    let mut f = BigInt::one();
    let mut g = BigInt::one();
    for (p, &v) in split.r1.iter().filter(|(p, _)| **p != two) {
        f *= pow(p, (v - 1) / 2);
    }
    for (p, &v) in split.r2.iter().filter(|(p, _)| **p != two) {
        f *= pow(p, v / 2 - 1);
    }
    for (p, &v) in split.m1.iter().filter(|(p, _)| **p != two) {
        g *= pow(p, (v - 1) / 2);
    }
    for (p, &v) in split.m2.iter().filter(|(p, _)| **p != two) {
        if numth::legendre(a, p)? == 1 {
            f *= pow(p, v / 2);
        } else {
            g *= pow(p, v / 2);
        }
    }
    let h = h_value(split, b);
    let e2 = two_exponent(split, a, b, &h).ok_or_else(|| {
        ConstructError::Internal(format!("v2(N) = {} is out of reach for a = {a}, b = {b}, h = {h}", split.v2()))
    })?;
    let power = pow(&two, e2);
    let mut epsilon = BigInt::one();
    if split.r1.contains_key(&two) || split.r2.contains_key(&two) {
        f *= &power;
        epsilon = power;
    } else if split.m1.contains_key(&two) {
        g *= power;
    } else if split.m2.contains_key(&two) {
        if a.mod_floor(&BigInt::from(8)).is_one() {
            f *= power;
        } else {
            g *= power;
        }
    } else if e2 != 0 {
        return Err(ConstructError::Internal(format!("odd level needs no power of 2, got e2 = {e2}")));
    }
    Ok(FghValues { f, g, h, epsilon })
}

fn aux_from_root(q: &BigInt, h: &BigInt, x: &BigInt) -> Result<AuxValues, ConstructError> {
    let x = x.mod_floor(q);
    if x.is_zero() {
        return Err(ConstructError::Internal(format!("square root is 0 mod q = {q}")));
    }
    let two_q = q * 2;
    let two_x = &x * 2;
    // 1 = s·q + t·(h·x)
    let (_, _, t) = numth::ext_gcd(q, &(h * &x))?;
    // 1 = v·q + w·(2x), u ≡ v·q + 2w
    let (_, v, w) = numth::ext_gcd(q, &two_x)?;
    let u = (v * q + w * 2u32).mod_floor(&two_q);
    // 1 = y·(−q) + z·(2x)
    let (_, _, z) = numth::ext_gcd(&-q, &two_x)?;
    let z = z.mod_floor(q);
    let zprime = (&z * 4u32).mod_floor(&two_q);
    Ok(AuxValues { t: t.mod_floor(q), x, u, z, zprime })
}

/// x is the least square root of a mod q when q | b, of b mod q when q | a.
pub fn auxiliary_values(
    a: &BigInt,
    b: &BigInt,
    q: &BigInt,
    h: &BigInt,
    q_divides: QDivides,
) -> Result<AuxValues, ConstructError> {
    let residue = match q_divides {
        QDivides::B => a,
        QDivides::A => b,
    };
    let x = numth::sqrt_mod(residue, q)?;
    aux_from_root(q, h, &x)
}

/// Exponent of each prime in the level, read off the index of the order in
/// the standard lattice: v_p(ab) + 2·v_p(fg) + v_p(h), plus v₂(4) at 2 when
/// a ≢ 1 mod 4, and 0 at q where the level has been lowered.
pub fn predict_local_levels(recipe: &OrderRecipe, split: &LevelSplit) -> BTreeMap<BigInt, u32> {
    let two = BigInt::from(2);
    let fg = &recipe.f * &recipe.g;
    let support = [&split.level, &recipe.q, &two, recipe.a(), recipe.b(), &recipe.f, &recipe.g, &recipe.h];
    let mut primes = BTreeSet::new();
    for n in support {
        let fac = numth::factorize(&n.abs()).expect("nonzero");
        primes.extend(fac.primes().cloned());
    }
    let v = |n: &BigInt, p: &BigInt| numth::strip(n, p).0;
    primes
        .into_iter()
        .map(|p| {
            let e = if p == recipe.q {
                0
            } else {
                let c = if p == two && !recipe.a_is_one_mod_four() { 2 } else { 0 };
                c + v(recipe.a(), &p) + v(recipe.b(), &p) + 2 * v(&fg, &p) + v(&recipe.h, &p)
            };
            (p, e)
        })
        .collect()
}

/// Small helper for tests and reports: exponents as machine integers.
pub fn levels_as_u64(levels: &BTreeMap<BigInt, u32>) -> BTreeMap<u64, u32> {
    levels.iter().map(|(p, e)| (p.to_u64().expect("desk-scale prime"), *e)).collect()
}
