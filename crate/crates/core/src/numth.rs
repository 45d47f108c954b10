//! Integer number theory over arbitrary-precision integers.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::NumthError;

/// Progression steps tried by [`find_prime`] before giving up.
pub const PRIME_SEARCH_BOUND: u64 = 1_000_000;

const TRIAL_BOUND: u32 = 10_000;

/// Prime decomposition of a positive integer, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    value: BigInt,
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Exponent of `p`, zero when absent.
    pub fn exponent(&self, p: &BigInt) -> u32 {
        self.factors
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|idx| self.factors[idx].1)
            .unwrap_or(0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Pairwise-coprime system of congruences `x ≡ residue (mod modulus)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CongruenceSystem {
    congruences: Vec<(BigInt, BigInt)>,
}

impl CongruenceSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `x ≡ residue (mod modulus)`, reducing the residue into `[0, modulus)`.
    pub fn push(&mut self, residue: BigInt, modulus: BigInt) -> Result<(), NumthError> {
        if !modulus.is_positive() {
            return Err(NumthError::NonPositiveModulus(modulus));
        }
        if let Some((_, m)) = self.congruences.iter().find(|(_, m)| !m.gcd(&modulus).is_one()) {
            return Err(NumthError::NonCoprimeModuli(m.clone(), modulus));
        }
        self.congruences.push((residue.mod_floor(&modulus), modulus));
        Ok(())
    }

    pub fn with(mut self, residue: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self, NumthError> {
        self.push(residue.into(), modulus.into())?;
        Ok(self)
    }

    pub fn congruences(&self) -> &[(BigInt, BigInt)] {
        &self.congruences
    }

    pub fn is_satisfied_by(&self, x: &BigInt) -> bool {
        self.congruences.iter().all(|(r, m)| &x.mod_floor(m) == r)
    }
}

impl fmt::Display for CongruenceSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.congruences.iter().map(|(r, m)| format!("{r} mod {m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A place of ℚ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Prime(BigInt),
    Infinity,
}

impl From<u64> for Place {
    fn from(p: u64) -> Self {
        Place::Prime(BigInt::from(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "∞"),
        }
    }
}

fn small_primes() -> impl Iterator<Item = u32> {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES
        .get_or_init(|| {
            let limit = TRIAL_BOUND as usize;
            let mut composite = vec![false; limit];
            let mut out = Vec::new();
            for n in 2..limit {
                if !composite[n] {
                    out.push(n as u32);
                    (n * n..limit).step_by(n).for_each(|m| composite[m] = true);
                }
            }
            out
        })
        .iter()
        .copied()
}

fn miller_rabin_round(n: &BigInt, d: &BigInt, s: u32, base: &BigInt) -> bool {
    let n_minus_one = n - 1u32;
    let mut x = base.modpow(d, n);
    if x.is_one() || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

/// Miller–Rabin; the first twelve prime bases are deterministic below 3.3·10²⁴,
/// beyond 64 bits forty prime bases are used.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == &BigInt::from(p) {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0) as u32;
    let d = &n_minus_one >> s;
    let rounds = if n.bits() <= 64 { 12 } else { 40 };
    small_primes()
        .take(rounds)
        .all(|b| miller_rabin_round(n, &d, s, &BigInt::from(b)))
}

fn pollard_brent(n: &BigInt) -> BigInt {
    const BATCH: u64 = 128;
    let mut c = BigInt::one();
    loop {
        let step = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut r = 1u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = step(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r *= 2;
        }
        if &g == n {
            // the batched product overshot; replay one step at a time
            loop {
                ys = step(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn split_into(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(&n);
    let rest = &n / &d;
    split_into(d, out);
    split_into(rest, out);
}

/// Trial division up to 10⁴, then Brent's variant of Pollard rho.
pub fn factorize(n: &BigInt) -> Result<Factorization, NumthError> {
    if !n.is_positive() {
        return Err(NumthError::NonPositive(n.clone()));
    }
    let mut rest = n.clone();
    let mut found: Vec<BigInt> = Vec::new();
    for p in small_primes() {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            found.push(bp.clone());
        }
    }
    split_into(rest, &mut found);
    found.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: n.clone(), factors })
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: &BigInt) -> Result<u32, NumthError> {
    if n.is_zero() {
        return Err(NumthError::Zero);
    }
    if !is_prime(p) {
        return Err(NumthError::NotPrime(p.clone()));
    }
    Ok(strip(n, p).0)
}

/// `(v, u)` with `n = p^v · u` and `p ∤ u`. Caller guarantees `n ≠ 0`, `p > 1`.
pub(crate) fn strip(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut u = n.clone();
    let mut v = 0;
    loop {
        let (quot, rem) = u.div_rem(p);
        if !rem.is_zero() {
            return (v, u);
        }
        u = quot;
        v += 1;
    }
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i8, NumthError> {
    if p == &BigInt::from(2) {
        return Err(NumthError::EvenPrime);
    }
    if !is_prime(p) {
        return Err(NumthError::NotPrime(p.clone()));
    }
    Ok(legendre_unchecked(a, p))
}

pub(crate) fn legendre_unchecked(a: &BigInt, p: &BigInt) -> i8 {
    let r = a.mod_floor(p);
    if r.is_zero() {
        return 0;
    }
    let e: BigInt = (p - 1u32) >> 1;
    if r.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

fn sign(odd_exponent: bool) -> i8 {
    if odd_exponent {
        -1
    } else {
        1
    }
}

/// Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, place: &Place) -> Result<i8, NumthError> {
    if a.is_zero() || b.is_zero() {
        return Err(NumthError::Zero);
    }
    match place {
        Place::Infinity => Ok(sign(a.is_negative() && b.is_negative())),
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(NumthError::NotPrime(p.clone()));
            }
            Ok(hilbert_at_prime(a, b, p))
        }
    }
}

pub(crate) fn hilbert_at_prime(a: &BigInt, b: &BigInt, p: &BigInt) -> i8 {
    let (alpha, u) = strip(a, p);
    let (beta, w) = strip(b, p);
    if p == &BigInt::from(2) {
        // ε(x) = (x−1)/2 and ω(x) = (x²−1)/8, both mod 2
        let eps = |x: &BigInt| matches!(x.mod_floor(&BigInt::from(4)).to_u8(), Some(3));
        let omega = |x: &BigInt| matches!(x.mod_floor(&BigInt::from(8)).to_u8(), Some(3 | 5));
        let odd = (eps(&u) && eps(&w)) ^ (alpha % 2 == 1 && omega(&w)) ^ (beta % 2 == 1 && omega(&u));
        return sign(odd);
    }
    let p_is_3_mod_4 = p.mod_floor(&BigInt::from(4)) == BigInt::from(3);
    let mut s = sign(alpha % 2 == 1 && beta % 2 == 1 && p_is_3_mod_4);
    if beta % 2 == 1 {
        s *= legendre_unchecked(&u, p);
    }
    if alpha % 2 == 1 {
        s *= legendre_unchecked(&w, p);
    }
    s
}

/// Tonelli–Shanks; returns the smaller of the two roots.
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Result<BigInt, NumthError> {
    if legendre(a, p)? != 1 {
        return Err(NumthError::NonResidue { a: a.clone(), p: p.clone() });
    }
    let a = a.mod_floor(p);
    let one = BigInt::one();
    let p_minus_one = p - 1u32;
    let s = p_minus_one.trailing_zeros().unwrap_or(0) as u32;
    let q = &p_minus_one >> s;
    let mut z = BigInt::from(2);
    while legendre_unchecked(&z, p) != -1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(&one << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    let other = p - &r;
    Ok(if other < r { other } else { r })
}

/// `(g, s, t)` with `s·a + t·b = g = gcd(a, b)`, `g ≥ 0` and `|t| ≤ |a|/(2g)`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt), NumthError> {
    if a.is_zero() && b.is_zero() {
        return Err(NumthError::ZeroGcd);
    }
    let e = a.extended_gcd(b);
    let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        s = -s;
        t = -t;
    }
    if !a.is_zero() {
        let step_t = (a / &g).abs();
        let step_s = b / &g * if a.is_negative() { -1 } else { 1 };
        // shift along the solution line s += k·b/g, t -= k·a/g
        let k = (&t * 2u32 + &step_t).div_floor(&(&step_t * 2u32));
        t -= &k * &step_t;
        s += &k * &step_s;
    }
    Ok((g, s, t))
}

/// Inverse of `a` modulo `m` in `[0, m)`.
pub fn inverse_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, s, _) = ext_gcd(a, m).ok()?;
    g.is_one().then(|| s.mod_floor(m))
}

/// Combines a congruence system into one residue class.
pub fn crt(system: &CongruenceSystem) -> Result<(BigInt, BigInt), NumthError> {
    let mut residue = BigInt::zero();
    let mut modulus = BigInt::one();
    for (r, m) in system.congruences() {
        let inv = inverse_mod(&modulus, m).ok_or_else(|| NumthError::NonCoprimeModuli(modulus.clone(), m.clone()))?;
        let k = ((r - &residue) * inv).mod_floor(m);
        residue += k * &modulus;
        modulus *= m;
    }
    Ok((residue.mod_floor(&modulus), modulus))
}

/// Smallest odd prime in the class of `system` that is not in `forbidden`.
pub fn find_prime(system: &CongruenceSystem, forbidden: &BTreeSet<BigInt>) -> Result<BigInt, NumthError> {
    let (residue, modulus) = crt(system)?;
    if !residue.gcd(&modulus).is_one() && !modulus.is_one() {
        return Err(NumthError::Unsolvable(system.to_string()));
    }
    let mut candidate = residue;
    for _ in 0..PRIME_SEARCH_BOUND {
        if candidate > BigInt::from(2) && is_prime(&candidate) && !forbidden.contains(&candidate) {
            return Ok(candidate);
        }
        candidate += &modulus;
    }
    Err(NumthError::SearchBoundExceeded { system: system.to_string(), bound: PRIME_SEARCH_BOUND })
}
