//! Exact arithmetic in B = (a, b / ℚ) with i² = a, j² = b, k = ij = −ji.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{NumthError, QuatError};
use crate::numth::{self, Place};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatAlgebra {
    a: BigInt,
    b: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatElement {
    coords: [BigRational; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldClass {
    Split,
    Ramified,
    Inert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraClass {
    Split,
    Ramified,
}

/// Local behaviour of K = ℚ(√a) and of B at a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeBehavior {
    pub p: BigInt,
    pub field_class: FieldClass,
    pub algebra_class: AlgebraClass,
}

impl fmt::Display for FieldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldClass::Split => "split",
            FieldClass::Ramified => "ramified",
            FieldClass::Inert => "inert",
        })
    }
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraClass::Split => "split",
            AlgebraClass::Ramified => "ramified",
        })
    }
}

impl QuatAlgebra {
    /// A definite algebra; both parameters must be negative.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, QuatError> {
        let alg = Self::new_unchecked_definiteness(a, b)?;
        if !alg.is_definite() {
            return Err(QuatError::Indefinite { a: alg.a, b: alg.b });
        }
        Ok(alg)
    }

    /// Skips the definiteness check; everything downstream still verifies.
    pub fn new_unchecked_definiteness(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, QuatError> {
        let (a, b) = (a.into(), b.into());
        if a.is_zero() || b.is_zero() {
            return Err(QuatError::ZeroParameter);
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_definite(&self) -> bool {
        self.a.is_negative() && self.b.is_negative()
    }

    pub fn multiply(&self, x: &QuatElement, y: &QuatElement) -> QuatElement {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let ab = &a * &b;
        let [x0, x1, x2, x3] = &x.coords;
        let [y0, y1, y2, y3] = &y.coords;
        QuatElement::new([
            x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3,
            x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2,
            x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ])
    }

    pub fn reduced_norm(&self, x: &QuatElement) -> BigRational {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let [x0, x1, x2, x3] = &x.coords;
        x0 * x0 - &a * x1 * x1 - &b * x2 * x2 + &a * &b * x3 * x3
    }

    /// Finite primes where `(a, b)_p = −1`, ascending.
    pub fn ramified_primes(&self) -> Vec<BigInt> {
        let two_ab = (&self.a * &self.b * 2u32).abs();
        let fac = numth::factorize(&two_ab).expect("2ab is a positive integer");
        fac.primes()
            .filter(|p| numth::hilbert_at_prime(&self.a, &self.b, p) == -1)
            .cloned()
            .collect()
    }

    /// Product of the ramified finite primes.
    pub fn discriminant(&self) -> BigInt {
        self.ramified_primes().iter().product()
    }

    pub fn classify_prime(&self, p: &BigInt) -> Result<PrimeBehavior, NumthError> {
        let h = numth::hilbert_symbol(&self.a, &self.b, &Place::Prime(p.clone()))?;
        // ℚ(√a) only sees a up to squares, so strip even powers of p first
        let (v, u) = numth::strip(&self.a, p);
        let p_divides = v % 2 == 1;
        let field_class = if p == &BigInt::from(2) {
            match (p_divides, u.mod_floor(&BigInt::from(8)).to_u8()) {
                (true, _) => FieldClass::Ramified,
                (false, Some(1)) => FieldClass::Split,
                (false, Some(5)) => FieldClass::Inert,
                _ => FieldClass::Ramified,
            }
        } else if p_divides {
            FieldClass::Ramified
        } else if numth::legendre_unchecked(&u, p) == 1 {
            FieldClass::Split
        } else {
            FieldClass::Inert
        };
        let algebra_class = if h == -1 { AlgebraClass::Ramified } else { AlgebraClass::Split };
        Ok(PrimeBehavior { p: p.clone(), field_class, algebra_class })
    }
}

impl fmt::Display for QuatAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} / Q)", self.a, self.b)
    }
}

impl QuatElement {
    pub fn new(coords: [BigRational; 4]) -> Self {
        Self { coords }
    }

    pub fn from_ints(coords: [i64; 4]) -> Self {
        Self::new(coords.map(|c| BigRational::from_integer(BigInt::from(c))))
    }

    /// `(n0 + n1·i + n2·j + n3·k) / den`.
    pub fn from_fraction(numerators: [i64; 4], den: i64) -> Self {
        let den = BigInt::from(den);
        Self::new(numerators.map(|c| BigRational::new(BigInt::from(c), den.clone())))
    }

    pub fn from_big(numerators: [BigInt; 4], den: &BigInt) -> Self {
        Self::new(numerators.map(|c| BigRational::new(c, den.clone())))
    }

    pub fn zero() -> Self {
        Self::from_ints([0, 0, 0, 0])
    }

    pub fn one() -> Self {
        Self::from_ints([1, 0, 0, 0])
    }

    pub fn i() -> Self {
        Self::from_ints([0, 1, 0, 0])
    }

    pub fn j() -> Self {
        Self::from_ints([0, 0, 1, 0])
    }

    pub fn k() -> Self {
        Self::from_ints([0, 0, 0, 1])
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.coords
    }

    pub fn conjugate(&self) -> Self {
        let [x0, x1, x2, x3] = self.coords.clone();
        Self::new([x0, -x1, -x2, -x3])
    }

    pub fn reduced_trace(&self) -> BigRational {
        &self.coords[0] * BigRational::from_integer(BigInt::from(2))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coords.clone().map(|x| x * c))
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl Add for &QuatElement {
    type Output = QuatElement;

    fn add(self, rhs: &QuatElement) -> QuatElement {
        QuatElement::new(std::array::from_fn(|n| &self.coords[n] + &rhs.coords[n]))
    }
}

impl Sub for &QuatElement {
    type Output = QuatElement;

    fn sub(self, rhs: &QuatElement) -> QuatElement {
        QuatElement::new(std::array::from_fn(|n| &self.coords[n] - &rhs.coords[n]))
    }
}

impl Neg for &QuatElement {
    type Output = QuatElement;

    fn neg(self) -> QuatElement {
        QuatElement::new(self.coords.clone().map(|c| -c))
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let terms: Vec<String> = self
            .coords
            .iter()
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| match (n, c.is_one()) {
                ("", _) => c.to_string(),
                (_, true) => n.to_string(),
                _ if c == &-BigRational::one() => format!("-{n}"),
                _ => format!("{c}{n}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + ").replace("+ -", "- "))
        }
    }
}
