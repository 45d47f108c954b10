use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::recipe::OrderRecipe;
use super::select::QDivides;
use crate::error::ConstructError;
use crate::lattice::{hnf, QuatLattice};
use crate::numth::{self, CongruenceSystem};
use crate::quat::{QuatAlgebra, QuatElement};

fn elem(numerators: [&BigInt; 4], den: &BigInt) -> QuatElement {
    QuatElement::from_big(numerators.map(Clone::clone), den)
}

/// ⟨1, g(1+i)/2, fhj, fg(hj+k)/2⟩ when a ≡ 1 mod 4, otherwise ⟨1, gi, fhj, fgk⟩.
pub fn pre_lowering_order(
    algebra: &QuatAlgebra,
    f: &BigInt,
    g: &BigInt,
    h: &BigInt,
) -> Result<QuatLattice, ConstructError> {
    let zero = BigInt::zero();
    let one = BigInt::one();
    let two = BigInt::from(2);
    let fh = f * h;
    let fg = f * g;
    let gens = if algebra.a().mod_floor(&BigInt::from(4)).is_one() {
        [
            QuatElement::one(),
            elem([g, g, &zero, &zero], &two),
            elem([&zero, &zero, &fh, &zero], &one),
            elem([&zero, &zero, &(&fg * h), &fg], &two),
        ]
    } else {
        [
            QuatElement::one(),
            elem([&zero, g, &zero, &zero], &one),
            elem([&zero, &zero, &fh, &zero], &one),
            elem([&zero, &zero, &zero, &fg], &one),
        ]
    };
    Ok(hnf(algebra, &gens)?)
}

/// Lowers the level at q by adjoining F·(xj + k)/q when q | b and F·(xi + k)/q
/// when q | a, with F the least multiplier that puts the element back in `order`.
pub fn lower_level(order: &QuatLattice, recipe: &OrderRecipe) -> Result<QuatLattice, ConstructError> {
    let zero = BigInt::zero();
    let one = BigInt::one();
    let theta = match recipe.q_divides {
        QDivides::B => elem([&zero, &zero, &recipe.x, &one], &one),
        QDivides::A => elem([&zero, &recipe.x, &zero, &one], &one),
    };
    let multiplier = order
        .rational_coordinates(&theta)
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    if multiplier.is_multiple_of(&recipe.q) {
        return Err(ConstructError::Internal(format!("multiplier {multiplier} for {theta} is divisible by q")));
    }
    let adjoined = theta.scale_int(&multiplier).scale(&num_rational::BigRational::new(one, recipe.q.clone()));
    let lowered = order.adjoin(&adjoined);
    match order.index_in(&lowered) {
        Some(index) if index == recipe.q => Ok(lowered),
        index => Err(ConstructError::Internal(format!(
            "adjoining {adjoined} changed the index by {index:?}, expected q = {}",
            recipe.q
        ))),
    }
}

fn lift(residue: &BigInt, modulus: &BigInt, divisor: &BigInt) -> Result<BigInt, ConstructError> {
    let system = CongruenceSystem::new().with(residue.clone(), modulus.clone())?.with(0, divisor.clone())?;
    Ok(numth::crt(&system)?.0)
}

/// The lowered order written down directly from the recipe.
///
/// Shapes, with G = g/2 when a ≡ 1 mod 4 and g is even, else G = g:
///
/// - a ≡ 1 mod 4, g odd, q | a: ⟨(q + gi + 2gck)/2q, g(2i + c′k)/2q, f(hj + gk)/2, fgk⟩
///   with c ≡ z (mod q), c ≡ 0 (mod f), c′ ≡ z′ (mod q), c′ ≡ 0 (mod 2f)
/// - a ≡ 1 mod 4, g odd, q | b: ⟨1, g(1+i)/2, fh(j + wk)/2q, fgk⟩ with w ≡ u (mod 2q), w ≡ 0 (mod g)
/// - otherwise, q | a: ⟨1, G(i + wk)/q, fhj, fGk⟩ with w ≡ ht (mod q), w ≡ 0 (mod f)
/// - otherwise, q | b: ⟨1, Gi, fh(j + wk)/q, fGk⟩ with w ≡ ht (mod q), w ≡ 0 (mod G)
pub fn closed_form_basis(recipe: &OrderRecipe) -> Result<QuatLattice, ConstructError> {
    let OrderRecipe { q, f, g, h, t, u, z, zprime, .. } = recipe;
    let zero = BigInt::zero();
    let one = BigInt::one();
    let two = BigInt::from(2);
    let two_q = q * 2;
    let fh = f * h;
    let half_shape = recipe.a_is_one_mod_four() && g.is_odd();
    let gens = if half_shape {
        let fg = f * g;
        match recipe.q_divides {
            QDivides::A => {
                let c = lift(z, q, f)?;
                let cp = lift(zprime, q, &(f * 2))?;
                [
                    elem([q, g, &zero, &(g * &c * 2)], &two_q),
                    elem([&zero, &(g * 2), &zero, &(g * cp)], &two_q),
                    elem([&zero, &zero, &fh, &fg], &two),
                    elem([&zero, &zero, &zero, &fg], &one),
                ]
            }
            QDivides::B => {
                let w = lift(u, &two_q, g)?;
                [
                    QuatElement::one(),
                    elem([g, g, &zero, &zero], &two),
                    elem([&zero, &zero, &fh, &(&fh * w)], &two_q),
                    elem([&zero, &zero, &zero, &fg], &one),
                ]
            }
        }
    } else {
        let big_g = if recipe.a_is_one_mod_four() { g / 2 } else { g.clone() };
        let fg = f * &big_g;
        let ht = (h * t).mod_floor(q);
        match recipe.q_divides {
            QDivides::A => {
                let w = lift(&ht, q, f)?;
                [
                    QuatElement::one(),
                    elem([&zero, &big_g, &zero, &(&big_g * w)], q),
                    elem([&zero, &zero, &fh, &zero], &one),
                    elem([&zero, &zero, &zero, &fg], &one),
                ]
            }
            QDivides::B => {
                let w = lift(&ht, q, &big_g)?;
                [
                    QuatElement::one(),
                    elem([&zero, &big_g, &zero, &zero], &one),
                    elem([&zero, &zero, &fh, &(&fh * w)], q),
                    elem([&zero, &zero, &zero, &fg], &one),
                ]
            }
        }
    };
    Ok(hnf(&recipe.algebra, &gens)?)
}
