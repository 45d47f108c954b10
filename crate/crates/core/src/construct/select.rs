use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::split::LevelSplit;
use crate::error::ConstructError;
use crate::numth::{self, CongruenceSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    C1a,
    C1b,
    C2,
    C3,
    C4,
    DeltaP,
    R1Only,
}

impl CaseTag {
    pub const ALL: [CaseTag; 7] =
        [CaseTag::C1a, CaseTag::C1b, CaseTag::C2, CaseTag::C3, CaseTag::C4, CaseTag::DeltaP, CaseTag::R1Only];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::C1a => "C1a",
            CaseTag::C1b => "C1b",
            CaseTag::C2 => "C2",
            CaseTag::C3 => "C3",
            CaseTag::C4 => "C4",
            CaseTag::DeltaP => "DELTA_P",
            CaseTag::R1Only => "R1_ONLY",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseTag::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown case '{s}', expected one of C1a, C1b, C2, C3, C4, DELTA_P, R1_ONLY"))
    }
}

impl Serialize for CaseTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Which algebra parameter carries the auxiliary prime q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QDivides {
    A,
    B,
}

impl fmt::Display for QDivides {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QDivides::A => "a",
            QDivides::B => "b",
        })
    }
}

/// Proof that no order of this level exists by this construction: 2 | Δ,
/// v₂(N) = 2 and the odd primes of R·M₁ multiply to 3 mod 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub disc: BigInt,
    pub level: BigInt,
    pub odd_product: BigInt,
}

impl Certificate {
    pub fn for_split(split: &LevelSplit) -> Option<Certificate> {
        let odd_product = split.rm1_odd_product();
        let blocked = split.disc_is_even() && split.v2() == 2 && odd_product.mod_floor(&BigInt::from(4)) == BigInt::from(3);
        blocked.then(|| Certificate { disc: split.disc.clone(), level: split.level.clone(), odd_product })
    }

    /// Re-derives the obstruction from Δ and N alone.
    pub fn holds(&self) -> bool {
        let two = BigInt::from(2);
        let four = BigInt::from(4);
        if !self.disc.is_even() || !self.level.is_multiple_of(&four) || self.level.is_multiple_of(&BigInt::from(8)) {
            return false;
        }
        let Ok(nf) = numth::factorize(&self.level) else { return false };
        let Ok(df) = numth::factorize(&self.disc) else { return false };
        let odd: BigInt = nf
            .factors()
            .iter()
            .filter(|(p, e)| *p != two && (df.exponent(p) > 0 || e % 2 == 1))
            .map(|(p, _)| p)
            .product();
        odd == self.odd_product && odd.mod_floor(&four) == BigInt::from(3)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "2 | Δ = {}, v2(N) = 2 for N = {}, and the odd primes of R·M1 multiply to {} ≡ 3 mod 4, so a and b cannot both be 3 mod 4",
            self.disc, self.level, self.odd_product
        )
    }
}

/// Residue classes of q that give the algebra the right local behaviour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QConditions {
    /// Admissible q mod 8.
    pub two_adic: Vec<u8>,
    /// For each odd prime p | ab/q, the admissible q mod p.
    pub odd: Vec<(BigInt, Vec<BigInt>)>,
}

impl QConditions {
    pub fn admits(&self, q: &BigInt) -> bool {
        let r8 = q.mod_floor(&BigInt::from(8)).to_u8().expect("residue mod 8");
        self.two_adic.contains(&r8) && self.odd.iter().all(|(p, ok)| ok.contains(&q.mod_floor(p)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub a: BigInt,
    pub b: BigInt,
    pub q: BigInt,
    pub case: CaseTag,
    pub q_divides: QDivides,
    pub conditions: QConditions,
    /// The class `find_prime` searched; `None` when q was supplied.
    pub searched: Option<CongruenceSystem>,
}

/// a = −ka·q, b = −kb (q | a) or a = −ka, b = −kb·q (q | b).
#[derive(Clone, Debug)]
struct Form {
    ka: BigInt,
    kb: BigInt,
    q_divides: QDivides,
}

impl Form {
    fn ab(&self, q: &BigInt) -> (BigInt, BigInt) {
        match self.q_divides {
            QDivides::A => (-(&self.ka * q), -self.kb.clone()),
            QDivides::B => (-self.ka.clone(), -(&self.kb * q)),
        }
    }
}

/// Case picked by the general dispatch on 2 | Δ and v₂(N).
pub fn default_case(split: &LevelSplit) -> Result<CaseTag, ConstructError> {
    let v2 = split.v2();
    let four = BigInt::from(4);
    Ok(match (split.disc_is_even(), v2) {
        (false, v) if v % 2 == 0 => {
            if split.rm1_product().mod_floor(&four) == BigInt::from(3) {
                CaseTag::C1a
            } else {
                CaseTag::C1b
            }
        }
        (false, _) => CaseTag::C2,
        (true, 2) => {
            if let Some(cert) = Certificate::for_split(split) {
                return Err(ConstructError::NotConstructible(cert));
            }
            CaseTag::C4
        }
        (true, _) => CaseTag::C3,
    })
}

fn form_for(case: CaseTag, split: &LevelSplit) -> Result<Form, ConstructError> {
    let one = BigInt::one();
    Ok(match case {
        CaseTag::C1a => Form { ka: split.rm1_product(), kb: one, q_divides: QDivides::B },
        CaseTag::C1b | CaseTag::C2 | CaseTag::C3 => {
            Form { ka: split.r2_product(), kb: split.rm1_product(), q_divides: QDivides::A }
        }
        CaseTag::C4 => Form { ka: split.r2_odd_product(), kb: split.rm1_odd_product(), q_divides: QDivides::A },
        CaseTag::DeltaP => {
            let p = split.disc.clone();
            let k = split.exponent(&p);
            if p == BigInt::from(2) || split.level != p.pow(k) {
                return Err(ConstructError::InvalidOverride(format!(
                    "DELTA_P needs an odd prime discriminant and a level that is a power of it, got Δ = {}, N = {}",
                    split.disc, split.level
                )));
            }
            if p.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
                Form { ka: p, kb: one, q_divides: QDivides::B }
            } else {
                let ka = if k.is_multiple_of(2) { p.clone() } else { one };
                Form { ka, kb: p, q_divides: QDivides::A }
            }
        }
        CaseTag::R1Only => {
            if !split.r2.is_empty() {
                return Err(ConstructError::InvalidOverride(format!(
                    "R1_ONLY needs every prime of Δ to have odd exponent in N, but R2 = {:?}",
                    split.r2.keys().map(ToString::to_string).collect::<Vec<_>>()
                )));
            }
            Form { ka: one, kb: split.rm1_product(), q_divides: QDivides::A }
        }
    })
}

/// h = ∏ p^(1 − v_p(b)) over R₂, leaving out 2 when v₂(N) = 2.
pub(crate) fn h_value(split: &LevelSplit, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    split
        .r2
        .keys()
        .filter(|p| !(split.v2() == 2 && **p == two))
        .filter(|p| !b.is_multiple_of(p))
        .product()
}

/// Half of v₂(N) − v₂(c) − v₂(ab) − v₂(h), where c = 1 for a ≡ 1 mod 4 and c = 4 otherwise.
pub(crate) fn two_exponent(split: &LevelSplit, a: &BigInt, b: &BigInt, h: &BigInt) -> Option<u32> {
    let two = BigInt::from(2);
    let v = |n: &BigInt| numth::strip(n, &two).0 as i64;
    let vc = if a.mod_floor(&BigInt::from(4)).is_one() { 0 } else { 2 };
    let rest = split.v2() as i64 - vc - v(a) - v(b) - v(h);
    (rest >= 0 && rest % 2 == 0).then_some((rest / 2) as u32)
}

/// Requirements on a mod 8 that put 2 in the right local cell.
fn structural_ok(case: CaseTag, split: &LevelSplit, a: &BigInt) -> bool {
    let a8 = a.mod_floor(&BigInt::from(8)).to_u8().expect("residue mod 8");
    let v2 = split.v2();
    match case {
        CaseTag::C1a | CaseTag::C1b => a8 % 4 == 1,
        CaseTag::C2 => a8 == 1,
        CaseTag::C3 if v2 == 1 => a8 == 5,
        CaseTag::C3 if v2 % 2 == 1 => a8 % 4 == 3,
        CaseTag::C3 => true,
        CaseTag::C4 => a8 % 4 == 3,
        CaseTag::DeltaP | CaseTag::R1Only => true,
    }
}

/// Classes of q mod 8 the default search prefers, when narrower than what is required.
fn preferred_two_adic(case: CaseTag, split: &LevelSplit) -> Option<Vec<u8>> {
    let two = BigInt::from(2);
    match case {
        CaseTag::C1a => Some(vec![1]),
        CaseTag::DeltaP if split.disc.mod_floor(&BigInt::from(4)) == BigInt::from(3) => Some(vec![1]),
        CaseTag::DeltaP => Some(vec![3, 7]),
        CaseTag::R1Only if split.m1.contains_key(&two) => Some(vec![7]),
        CaseTag::R1Only if split.r1.contains_key(&two) => Some(vec![3]),
        CaseTag::R1Only => Some(vec![3, 7]),
        _ => None,
    }
}

fn conditions_for(case: CaseTag, split: &LevelSplit, form: &Form) -> Result<QConditions, ConstructError> {
    let two = BigInt::from(2);
    let target = |p: &BigInt| if split.is_disc_prime(p) { -1 } else { 1 };

    let two_adic: Vec<u8> = [1u8, 3, 5, 7]
        .into_iter()
        .filter(|&s| {
            let (a, b) = form.ab(&BigInt::from(s));
            let h = h_value(split, &b);
            numth::hilbert_at_prime(&a, &b, &two) == target(&two)
                && two_exponent(split, &a, &b, &h).is_some()
                && structural_ok(case, split, &a)
        })
        .collect();
    if two_adic.is_empty() {
        return Err(ConstructError::InvalidOverride(format!(
            "case {case} admits no class of q mod 8 for Δ = {}, N = {}",
            split.disc, split.level
        )));
    }

    let fixed = numth::factorize(&(&form.ka * &form.kb))?;
    for p in split.disc_primes() {
        if p != &two && fixed.exponent(p) == 0 {
            return Err(ConstructError::InvalidOverride(format!("case {case} cannot ramify the algebra at {p}")));
        }
    }
    let mut odd = Vec::new();
    for p in fixed.primes().filter(|p| **p != two) {
        let residues = num_iter(p);
        let ok: Vec<BigInt> = residues
            .filter(|s| {
                let (a, b) = form.ab(s);
                numth::hilbert_at_prime(&a, &b, p) == target(p)
            })
            .collect();
        if ok.is_empty() {
            return Err(ConstructError::InvalidOverride(format!(
                "case {case} cannot give the right Hilbert symbol at {p} for any q"
            )));
        }
        odd.push((p.clone(), ok));
    }
    Ok(QConditions { two_adic, odd })
}

fn num_iter(p: &BigInt) -> impl Iterator<Item = BigInt> {
    let p = p.clone();
    std::iter::successors(Some(BigInt::one()), move |s| Some(s + 1u32).filter(|n| n < &p))
}

/// One congruence per restricted prime, smallest admissible residue first.
fn default_system(case: CaseTag, split: &LevelSplit, conds: &QConditions) -> Result<CongruenceSystem, ConstructError> {
    let mut s2 = conds.two_adic.clone();
    if let Some(preferred) = preferred_two_adic(case, split) {
        let narrowed: Vec<u8> = s2.iter().copied().filter(|s| preferred.contains(s)).collect();
        if !narrowed.is_empty() {
            s2 = narrowed;
        }
    }
    let mut system = CongruenceSystem::new();
    if s2.len() < 4 {
        let min = *s2.iter().min().expect("nonempty");
        if s2.iter().all(|s| s2.contains(&((s + 4) % 8))) {
            system.push(BigInt::from(min % 4), BigInt::from(4))?;
        } else {
            system.push(BigInt::from(min), BigInt::from(8))?;
        }
    }
    for (p, ok) in &conds.odd {
        if (ok.len() as u64) + 1 < p.to_u64().unwrap_or(u64::MAX) {
            system.push(ok[0].clone(), p.clone())?;
        }
    }
    Ok(system)
}

/// Chooses (a, b, q) so that B = (a, b) has discriminant Δ and the level
/// split lands in the right local cells.
pub fn select_ab(
    split: &LevelSplit,
    q_override: Option<&BigInt>,
    case_override: Option<CaseTag>,
) -> Result<Selection, ConstructError> {
    let case = match case_override {
        Some(c) => c,
        None => default_case(split)?,
    };
    let form = form_for(case, split)?;
    let conditions = conditions_for(case, split, &form)?;
    let forbidden: BTreeSet<BigInt> = numth::factorize(&(&split.level * &split.disc * 2u32))?.primes().cloned().collect();

    let (q, searched) = match q_override {
        Some(q) => {
            if !numth::is_prime(q) || q == &BigInt::from(2) {
                return Err(ConstructError::InvalidOverride(format!("q = {q} is not an odd prime")));
            }
            if forbidden.contains(q) {
                return Err(ConstructError::InvalidOverride(format!("q = {q} divides 2·N·Δ")));
            }
            if !conditions.admits(q) {
                return Err(ConstructError::InvalidOverride(format!(
                    "q = {q} gives the wrong local behaviour for case {case}: need q mod 8 in {:?}{}",
                    conditions.two_adic,
                    conditions
                        .odd
                        .iter()
                        .filter(|(p, ok)| !ok.contains(&q.mod_floor(p)))
                        .map(|(p, _)| format!(", a different class mod {p}"))
                        .collect::<String>()
                )));
            }
            (q.clone(), None)
        }
        None => {
            let system = default_system(case, split, &conditions)?;
            let q = numth::find_prime(&system, &forbidden)?;
            if !conditions.admits(&q) {
                return Err(ConstructError::Internal(format!("q = {q} from {system} misses the local conditions")));
            }
            (q, Some(system))
        }
    };
    let (a, b) = form.ab(&q);
    debug_assert!(!a.is_zero() && !b.is_zero());
    Ok(Selection { a, b, q, case, q_divides: form.q_divides, conditions, searched })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::split_level;

    fn split(n: i64, d: i64) -> LevelSplit {
        split_level(&BigInt::from(n), &BigInt::from(d)).unwrap()
    }

    #[test]
    fn disc70_large_level_selection() {
        let s = split(4889996650, 70);
        let sel = select_ab(&s, None, None).unwrap();
        assert_eq!((sel.a, sel.b, sel.q), (BigInt::from(-7435), BigInt::from(-770), BigInt::from(1487)));
        assert_eq!(sel.case, CaseTag::C3);
        assert_eq!(sel.q_divides, QDivides::A);
        let expected = CongruenceSystem::new().with(7, 8).unwrap().with(2, 5).unwrap().with(3, 7).unwrap().with(2, 11).unwrap();
        assert_eq!(sel.searched.unwrap(), expected);
    }

    #[test]
    fn disc7_level49_override() {
        let s = split(49, 7);
        let sel = select_ab(&s, Some(&BigInt::from(11)), Some(CaseTag::DeltaP)).unwrap();
        assert_eq!((sel.a, sel.b), (BigInt::from(-7), BigInt::from(-11)));
        assert_eq!(sel.q_divides, QDivides::B);
    }

    #[test]
    fn disc7_level49_default_dispatch() {
        let sel = select_ab(&split(49, 7), Some(&BigInt::from(11)), None).unwrap();
        assert_eq!(sel.case, CaseTag::C1a);
        assert_eq!((sel.a, sel.b), (BigInt::from(-7), BigInt::from(-11)));
        // without an override the search insists on q ≡ 1 mod 8
        let sel = select_ab(&split(49, 7), None, None).unwrap();
        assert_eq!(sel.q.mod_floor(&BigInt::from(8)), BigInt::one());
    }

    #[test]
    fn rejects_bad_override() {
        let s = split(49, 7);
        // −13 ≡ 1 is a square mod 7, which leaves the algebra split at 7
        let err = select_ab(&s, Some(&BigInt::from(13)), Some(CaseTag::DeltaP)).unwrap_err();
        assert!(matches!(err, ConstructError::InvalidOverride(_)), "{err}");
        assert!(matches!(select_ab(&s, Some(&BigInt::from(7)), None), Err(ConstructError::InvalidOverride(_))));
        assert!(matches!(select_ab(&s, Some(&BigInt::from(15)), None), Err(ConstructError::InvalidOverride(_))));
        assert!(matches!(select_ab(&split(98, 7), None, Some(CaseTag::DeltaP)), Err(ConstructError::InvalidOverride(_))));
        assert!(matches!(select_ab(&split(49, 7), None, Some(CaseTag::R1Only)), Err(ConstructError::InvalidOverride(_))));
    }

    #[test]
    fn not_constructible() {
        let s = split(140, 70);
        match select_ab(&s, None, None) {
            Err(ConstructError::NotConstructible(cert)) => {
                assert_eq!(cert.odd_product, BigInt::from(35));
                assert!(cert.holds());
            }
            other => panic!("expected NotConstructible, got {other:?}"),
        }
    }

    #[test]
    fn certificate_does_not_hold_elsewhere() {
        let cert = Certificate { disc: BigInt::from(70), level: BigInt::from(280), odd_product: BigInt::from(35) };
        assert!(!cert.holds());
        assert!(Certificate::for_split(&split(4 * 5 * 7 * 3, 70)).is_none());
    }

    #[test]
    fn case_names_round_trip() {
        for c in CaseTag::ALL {
            assert_eq!(c.as_str().parse::<CaseTag>().unwrap(), c);
        }
        assert!("C5".parse::<CaseTag>().is_err());
    }
}
