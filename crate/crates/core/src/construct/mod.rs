//! From (Δ, N) to an explicit order of level N in a definite algebra of discriminant Δ.
//!
//! The pipeline picks (a, b) and an auxiliary prime q so that B = (a, b) ramifies
//! exactly at Δ, builds an order of level q·N, then removes q by adjoining one
//! element. The result is cross-checked against a closed-form basis.

mod basis;
mod recipe;
mod select;
mod split;

use std::collections::BTreeMap;

use num_bigint::BigInt;

pub use basis::{closed_form_basis, lower_level, pre_lowering_order};
pub use recipe::{auxiliary_values, compute_fgh, levels_as_u64, predict_local_levels, AuxValues, FghValues, OrderRecipe};
pub use select::{default_case, select_ab, CaseTag, Certificate, QConditions, QDivides, Selection};
pub use split::{split_level, LevelSplit};

use crate::error::ConstructError;
use crate::lattice::QuatLattice;
use crate::quat::QuatAlgebra;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructOptions {
    pub q_override: Option<BigInt>,
    pub case_override: Option<CaseTag>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderResult {
    pub split: LevelSplit,
    pub recipe: OrderRecipe,
    pub order: QuatLattice,
    pub level: BigInt,
    pub predicted_local: BTreeMap<BigInt, u32>,
}

/// Runs every stage and fails loudly if the two basis constructions disagree,
/// if the level is not N, or if the per-prime prediction misses.
pub fn construct_order(disc: &BigInt, level: &BigInt, options: &ConstructOptions) -> Result<OrderResult, ConstructError> {
    let split = split_level(level, disc)?;
    let sel = select_ab(&split, options.q_override.as_ref(), options.case_override)?;
    let algebra = QuatAlgebra::new(sel.a.clone(), sel.b.clone())?;
    if algebra.ramified_primes() != split.disc_primes() {
        return Err(ConstructError::Internal(format!(
            "{algebra} ramifies at {:?}, expected the primes of {disc}",
            algebra.ramified_primes().iter().map(ToString::to_string).collect::<Vec<_>>()
        )));
    }
    let fgh = compute_fgh(&split, &sel.a, &sel.b)?;
    let aux = auxiliary_values(&sel.a, &sel.b, &sel.q, &fgh.h, sel.q_divides)?;
    let recipe = OrderRecipe {
        algebra,
        q: sel.q,
        case: sel.case,
        q_divides: sel.q_divides,
        f: fgh.f,
        g: fgh.g,
        h: fgh.h,
        epsilon: fgh.epsilon,
        x: aux.x,
        t: aux.t,
        u: aux.u,
        z: aux.z,
        zprime: aux.zprime,
    };
    build_from_recipe(split, recipe)
}

/// The stages after (a, b, q) and the scalars are fixed.
pub fn build_from_recipe(split: LevelSplit, recipe: OrderRecipe) -> Result<OrderResult, ConstructError> {
    let pre = pre_lowering_order(&recipe.algebra, &recipe.f, &recipe.g, &recipe.h)?;
    let order = lower_level(&pre, &recipe)?;
    let closed = closed_form_basis(&recipe)?;
    if closed != order {
        return Err(ConstructError::Internal(format!("closed form {closed} differs from adjunction result {order}")));
    }
    let level = order.reduced_discriminant()?;
    if level != split.level {
        return Err(ConstructError::Internal(format!("constructed order has level {level}, expected {}", split.level)));
    }
    let predicted_local = predict_local_levels(&recipe, &split);
    let measured = order.per_prime_level()?;
    for (p, e) in &predicted_local {
        let got = measured.get(p).copied().unwrap_or(0);
        if got != *e {
            return Err(ConstructError::Internal(format!("level exponent at {p} is {got}, predicted {e}")));
        }
    }
    Ok(OrderResult { split, recipe, order, level, predicted_local })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn disc3_level27() {
        let res = construct_order(&big(3), &big(27), &ConstructOptions::default()).unwrap();
        assert_eq!(res.level, big(27));
        assert!(res.order.is_order());
    }

    #[test]
    fn disc70_large_level() {
        let res = construct_order(&big(70), &big(4889996650), &ConstructOptions::default()).unwrap();
        assert_eq!(res.recipe.q, big(1487));
        assert_eq!(res.level, big(4889996650));
        let expected: BTreeMap<u64, u32> = [(2, 1), (5, 2), (7, 5), (11, 1), (23, 2), (1487, 0)].into_iter().collect();
        assert_eq!(levels_as_u64(&res.predicted_local), expected);
    }

    #[test]
    fn disc7_level49_local_levels() {
        let opts = ConstructOptions { q_override: Some(big(11)), case_override: None };
        let res = construct_order(&big(7), &big(49), &opts).unwrap();
        let expected: BTreeMap<u64, u32> = [(2, 0), (7, 2), (11, 0)].into_iter().collect();
        assert_eq!(levels_as_u64(&res.predicted_local), expected);
    }

    #[test]
    fn not_constructible_propagates() {
        let err = construct_order(&big(70), &big(140), &ConstructOptions::default()).unwrap_err();
        assert!(matches!(err, ConstructError::NotConstructible(_)));
    }

    #[test]
    fn special_cases_build_orders() {
        for (disc, level, case) in [
            (3, 27, CaseTag::DeltaP),
            (3, 81, CaseTag::DeltaP),
            (5, 125, CaseTag::DeltaP),
            (5, 625, CaseTag::DeltaP),
            (13, 13, CaseTag::DeltaP),
            (3, 27, CaseTag::R1Only),
            (30, 30 * 11, CaseTag::R1Only),
            (2, 8 * 9, CaseTag::R1Only),
        ] {
            let opts = ConstructOptions { q_override: None, case_override: Some(case) };
            let res = construct_order(&big(disc), &big(level), &opts).unwrap_or_else(|e| panic!("{disc} {level} {case}: {e}"));
            assert_eq!(res.level, big(level));
            assert_eq!(res.recipe.case, case);
        }
    }
}
