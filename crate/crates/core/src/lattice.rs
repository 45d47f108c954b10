//! Full-rank ℤ-lattices in a quaternion algebra, kept in canonical Hermite normal form.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::LatticeError;
use crate::numth;
use crate::quat::{QuatAlgebra, QuatElement};

/// Lattice `(1/denominator)·ℤ⟨rows⟩`. The integer rows form an upper-triangular
/// HNF with positive diagonal and above-diagonal entries in `[0, diagonal)`, and
/// the denominator is as small as possible, so equal lattices compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatLattice {
    algebra: QuatAlgebra,
    denominator: BigInt,
    rows: [[BigInt; 4]; 4],
}

/// Outcome of checking a lattice against an expected discriminant and level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    pub is_order: bool,
    pub reduced_discriminant: Option<BigInt>,
    pub per_prime_level: BTreeMap<BigInt, u32>,
    pub failures: Vec<String>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.is_order && self.failures.is_empty()
    }
}

fn integer_hnf(mut pending: Vec<[BigInt; 4]>) -> Result<[[BigInt; 4]; 4], LatticeError> {
    let mut pivots: Vec<[BigInt; 4]> = Vec::with_capacity(4);
    for col in 0..4 {
        loop {
            let nonzero: Vec<usize> = (0..pending.len()).filter(|&r| !pending[r][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let &piv = nonzero.iter().min_by_key(|&&r| pending[r][col].abs()).expect("nonempty");
            let pivot_row = pending[piv].clone();
            for &r in nonzero.iter().filter(|&&r| r != piv) {
                let quot = pending[r][col].div_floor(&pivot_row[col]);
                for c in col..4 {
                    let delta = &quot * &pivot_row[c];
                    pending[r][c] -= delta;
                }
            }
        }
        let Some(idx) = (0..pending.len()).find(|&r| !pending[r][col].is_zero()) else {
            return Err(LatticeError::RankDeficient(pivots.len()));
        };
        let mut row = pending.swap_remove(idx);
        if row[col].is_negative() {
            row.iter_mut().for_each(|c| *c = -&*c);
        }
        pivots.push(row);
    }
    for i in 1..4 {
        for r in 0..i {
            let quot = pivots[r][i].div_floor(&pivots[i][i]);
            if !quot.is_zero() {
                for c in i..4 {
                    let delta = &quot * &pivots[i][c];
                    pivots[r][c] -= delta;
                }
            }
        }
    }
    Ok(pivots.try_into().expect("four pivots"))
}

fn determinant(mut m: [[BigRational; 4]; 4]) -> BigRational {
    let mut det = BigRational::one();
    for col in 0..4 {
        let Some(piv) = (col..4).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..4 {
            let factor = &m[r][col] / &m[col][col];
            for c in col..4 {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Canonical basis of the ℤ-span of `generators`.
pub fn hnf(algebra: &QuatAlgebra, generators: &[QuatElement]) -> Result<QuatLattice, LatticeError> {
    let den = generators.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator()));
    let rows: Vec<[BigInt; 4]> = generators
        .iter()
        .map(|g| g.coords().clone().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()))
        .collect();
    let mut rows = integer_hnf(rows)?;
    let common = rows.iter().flatten().fold(den.clone(), |acc, c| acc.gcd(c));
    rows.iter_mut().flatten().for_each(|c| *c /= &common);
    Ok(QuatLattice { algebra: algebra.clone(), denominator: den / common, rows })
}

impl QuatLattice {
    /// ℤ⟨1, i, j, k⟩.
    pub fn standard(algebra: &QuatAlgebra) -> Self {
        let basis = [QuatElement::one(), QuatElement::i(), QuatElement::j(), QuatElement::k()];
        hnf(algebra, &basis).expect("standard basis has full rank")
    }

    pub fn algebra(&self) -> &QuatAlgebra {
        &self.algebra
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn integer_rows(&self) -> &[[BigInt; 4]; 4] {
        &self.rows
    }

    pub fn basis(&self) -> [QuatElement; 4] {
        std::array::from_fn(|r| QuatElement::from_big(self.rows[r].clone(), &self.denominator))
    }

    /// Coordinates of `x` in the basis, when they are integers.
    pub fn coordinates(&self, x: &QuatElement) -> Option<[BigInt; 4]> {
        let rational = self.rational_coordinates(x);
        rational.iter().all(|c| c.is_integer()).then(|| rational.map(|c| c.to_integer()))
    }

    /// Coordinates of `x` in the (ℚ-)basis; the lattice is triangular so this is back substitution.
    pub fn rational_coordinates(&self, x: &QuatElement) -> [BigRational; 4] {
        let den = BigRational::from_integer(self.denominator.clone());
        let mut rest: Vec<BigRational> = x.coords().iter().map(|c| c * &den).collect();
        let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for r in 0..4 {
            let coeff = &rest[r] / BigRational::from_integer(self.rows[r][r].clone());
            for c in r..4 {
                rest[c] -= &coeff * BigRational::from_integer(self.rows[r][c].clone());
            }
            out[r] = coeff;
        }
        out
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.coordinates(x).is_some()
    }

    /// Every way this lattice fails to be an order; empty for orders.
    pub fn order_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        if !self.contains(&QuatElement::one()) {
            failures.push("1 is not in the lattice".to_string());
        }
        let basis = self.basis();
        for (n, e) in basis.iter().enumerate() {
            if !e.reduced_trace().is_integer() {
                failures.push(format!("trd(e{n}) = {} is not integral for e{n} = {e}", e.reduced_trace()));
            }
            let nrd = self.algebra.reduced_norm(e);
            if !nrd.is_integer() {
                failures.push(format!("nrd(e{n}) = {nrd} is not integral for e{n} = {e}"));
            }
        }
        for (u, eu) in basis.iter().enumerate() {
            for (v, ev) in basis.iter().enumerate() {
                let prod = self.algebra.multiply(eu, ev);
                if !self.contains(&prod) {
                    failures.push(format!("e{u}·e{v} = {prod} is not in the lattice"));
                }
            }
        }
        failures
    }

    pub fn is_order(&self) -> bool {
        self.order_failures().is_empty()
    }

    /// det of the trace pairing `trd(e_u·e_v)`, computed for any lattice.
    pub fn trace_pairing_determinant(&self) -> BigRational {
        let basis = self.basis();
        let gram: [[BigRational; 4]; 4] =
            std::array::from_fn(|u| std::array::from_fn(|v| self.algebra.multiply(&basis[u], &basis[v]).reduced_trace()));
        determinant(gram)
    }

    fn order_determinant(&self) -> Result<BigInt, LatticeError> {
        if let Some(first) = self.order_failures().into_iter().next() {
            return Err(LatticeError::NotAnOrder(first));
        }
        let det = self.trace_pairing_determinant();
        if !det.is_integer() {
            return Err(LatticeError::NotAnOrder(format!("trace pairing determinant {det} is not integral")));
        }
        Ok(det.to_integer().abs())
    }

    /// The positive `d` with `d² = |det trd(e_u·e_v)|`.
    pub fn reduced_discriminant(&self) -> Result<BigInt, LatticeError> {
        let det = self.order_determinant()?;
        let root = det.sqrt();
        if &root * &root != det {
            return Err(LatticeError::NonSquareDiscriminant(det));
        }
        Ok(root)
    }

    /// Half the exponent of each prime in `|det trd(e_u·e_v)|`, from its factorization.
    pub fn per_prime_level(&self) -> Result<BTreeMap<BigInt, u32>, LatticeError> {
        let det = self.order_determinant()?;
        let fac = numth::factorize(&det).map_err(|_| LatticeError::NonSquareDiscriminant(det.clone()))?;
        let mut out = BTreeMap::new();
        for (p, e) in fac.factors() {
            if e % 2 == 1 {
                return Err(LatticeError::NonSquareDiscriminant(det.clone()));
            }
            out.insert(p.clone(), e / 2);
        }
        Ok(out)
    }

    pub fn adjoin(&self, x: &QuatElement) -> QuatLattice {
        let mut gens = self.basis().to_vec();
        gens.push(x.clone());
        hnf(&self.algebra, &gens).expect("a full-rank lattice stays full rank")
    }

    /// Index `[other : self]` when `self ⊆ other`.
    pub fn index_in(&self, other: &QuatLattice) -> Option<BigInt> {
        if !self.basis().iter().all(|e| other.contains(e)) {
            return None;
        }
        let volume = |l: &QuatLattice| {
            let diag: BigInt = (0..4).map(|n| l.rows[n][n].clone()).product();
            BigRational::new(diag, l.denominator.pow(4))
        };
        Some((volume(self) / volume(other)).to_integer())
    }
}

impl fmt::Display for QuatLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis: Vec<String> = self.basis().iter().map(ToString::to_string).collect();
        write!(f, "Z<{}>", basis.join(", "))
    }
}
