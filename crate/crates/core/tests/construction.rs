use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use quatorder::construct::{
    build_from_recipe, closed_form_basis, levels_as_u64, lower_level, pre_lowering_order, select_ab, split_level,
    CaseTag, ConstructOptions,
};
use quatorder::lattice::hnf;
use quatorder::numth;
use quatorder::quat::{QuatAlgebra, QuatElement};
use quatorder::verify::{admissible_instances, check_instance, sweep, sweep_sequential, verify_order, InstanceOutcome};
use quatorder::{construct_order, ConstructError};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

#[test]
fn disc70_large_level_recipe() {
    let res = construct_order(&big(70), &big(4_889_996_650), &ConstructOptions::default()).unwrap();
    let r = &res.recipe;
    assert_eq!((r.a(), r.b()), (&big(-7435), &big(-770)));
    assert_eq!(r.case, CaseTag::C3);
    let got: Vec<i64> = [&r.q, &r.x, &r.f, &r.g, &r.h, &r.epsilon, &r.t, &r.u, &r.z, &r.zprime]
        .iter()
        .map(|v| v.to_i64().unwrap())
        .collect();
    assert_eq!(got, [1487, 593, 49, 23, 1, 1, 1156, 2643, 578, 2312]);
    assert!(verify_order(&res.order, &big(70), &big(4_889_996_650)).passed());
}

#[test]
fn disc70_reference_basis_has_the_level() {
    // coefficients 2·578 and 2312: a different lattice from ours, same level
    let res = construct_order(&big(70), &big(4_889_996_650), &ConstructOptions::default()).unwrap();
    let alg = &res.recipe.algebra;
    let fixture = hnf(
        alg,
        &[
            QuatElement::from_big([big(1487), big(23), big(0), big(2 * 23 * 578)], &big(2 * 1487)),
            QuatElement::from_big([big(0), big(2 * 23), big(0), big(23 * 2312)], &big(2 * 1487)),
            QuatElement::from_fraction([0, 0, 49, 49 * 23], 2),
            QuatElement::from_ints([0, 0, 0, 49 * 23]),
        ],
    )
    .unwrap();
    let report = verify_order(&fixture, &big(70), &big(4_889_996_650));
    assert!(report.passed(), "{:?}", report.failures);
}

#[test]
fn disc7_level49_with_q_eleven() {
    let opts = ConstructOptions { q_override: Some(big(11)), case_override: None };
    let res = construct_order(&big(7), &big(49), &opts).unwrap();
    assert_eq!((res.recipe.a(), res.recipe.b()), (&big(-7), &big(-11)));
    let known = hnf(
        &res.recipe.algebra,
        &[QuatElement::one(), QuatElement::from_fraction([1, 1, 0, 0], 2), QuatElement::from_fraction([0, 0, 7, -35], 22), QuatElement::k()],
    )
    .unwrap();
    assert_eq!(res.order, known);
    assert_eq!(res.level, big(49));
}

#[test]
fn disc3_level27_parameters_through_overrides() {
    let opts = ConstructOptions { q_override: Some(big(7)), case_override: Some(CaseTag::R1Only) };
    let res = construct_order(&big(3), &big(27), &opts).unwrap();
    assert_eq!((res.recipe.a(), res.recipe.b()), (&big(-7), &big(-3)));
    assert_eq!(res.level, big(27));
    let default = construct_order(&big(3), &big(27), &ConstructOptions::default()).unwrap();
    assert!(verify_order(&default.order, &big(3), &big(27)).passed());
}

#[test]
fn disc3_level27_fixture_basis_is_not_closed() {
    let alg = QuatAlgebra::new(-7, -3).unwrap();
    let fixture = hnf(
        &alg,
        &[
            QuatElement::from_fraction([1, 1, 0, 0], 2),
            QuatElement::i(),
            QuatElement::from_fraction([0, 0, 3, 309], 146),
            QuatElement::from_ints([0, 0, 0, 3]),
        ],
    )
    .unwrap();
    let report = verify_order(&fixture, &big(3), &big(27));
    assert!(!report.is_order);
}

#[test]
fn certificate_for_seventy_one_forty() {
    match construct_order(&big(70), &big(140), &ConstructOptions::default()) {
        Err(ConstructError::NotConstructible(cert)) => {
            assert!(cert.holds());
            assert_eq!(cert.odd_product, big(35));
        }
        other => panic!("expected a certificate, got {other:?}"),
    }
}

#[test]
fn every_skip_in_range_is_certified() {
    for (d, n) in admissible_instances(30, 500) {
        if let InstanceOutcome::Skipped(cert) = check_instance(d, n) {
            assert!(cert.holds());
            assert!(d % 2 == 0 && n % 4 == 0 && n % 8 != 0, "({d}, {n})");
        }
    }
}

#[test]
fn sweep_thirty_by_three_hundred() {
    let report = sweep(30, 300, 4);
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert_eq!(report.passed, report.attempted - report.skipped_not_constructible);
    assert_eq!(report, sweep_sequential(30, 300));
    assert_eq!(report, sweep(30, 300, 1));
}

#[test]
fn both_paths_agree_across_the_range() {
    for (d, n) in admissible_instances(30, 500) {
        let res = match construct_order(&big(d as i64), &big(n as i64), &ConstructOptions::default()) {
            Ok(res) => res,
            Err(ConstructError::NotConstructible(_)) => continue,
            Err(e) => panic!("({d}, {n}): {e}"),
        };
        let r = &res.recipe;
        let pre = pre_lowering_order(&r.algebra, &r.f, &r.g, &r.h).unwrap();
        let adjoined = lower_level(&pre, r).unwrap();
        assert_eq!(adjoined, closed_form_basis(r).unwrap(), "({d}, {n})");
        assert_eq!(adjoined, res.order);
    }
}

/// The two roots pick the two maximal orders at q above the level-q Eichler
/// order, so the lattices differ; each is still a verified order of level N.
#[test]
fn other_root_gives_another_order_of_the_same_level() {
    for (d, n) in admissible_instances(30, 500) {
        let Ok(res) = construct_order(&big(d as i64), &big(n as i64), &ConstructOptions::default()) else { continue };
        let other = res.recipe.with_root(&(&res.recipe.q - &res.recipe.x)).unwrap();
        let swapped = build_from_recipe(res.split.clone(), other).unwrap();
        assert!(verify_order(&swapped.order, &big(d as i64), &big(n as i64)).passed(), "({d}, {n})");
        assert_ne!(swapped.order, res.order, "({d}, {n})");
    }
}

#[test]
fn default_q_is_the_least_prime_in_its_class() {
    for (d, n) in [(70u64, 4_889_996_650u64), (7, 49), (3, 27), (30, 330), (13, 13 * 13 * 17), (2, 72)] {
        let split = split_level(&BigInt::from(n), &BigInt::from(d)).unwrap();
        let sel = select_ab(&split, None, None).unwrap();
        let system = sel.searched.clone().unwrap();
        let forbidden: BTreeSet<BigInt> = numth::factorize(&BigInt::from(2 * n * d)).unwrap().primes().cloned().collect();
        let q = sel.q.to_u64().unwrap();
        for p in 3..q {
            let p = BigInt::from(p);
            assert!(
                !(numth::is_prime(&p) && !forbidden.contains(&p) && system.is_satisfied_by(&p)),
                "({d}, {n}): {p} < {q} also fits {system}"
            );
        }
    }
}

#[test]
fn three_smallest_admissible_q_all_work() {
    for (d, n) in [(70u64, 4_889_996_650u64), (7, 49), (5, 125), (30, 6000), (11, 11 * 9 * 49)] {
        let split = split_level(&BigInt::from(n), &BigInt::from(d)).unwrap();
        let sel = select_ab(&split, None, None).unwrap();
        let forbidden: BTreeSet<BigInt> = numth::factorize(&BigInt::from(2 * n * d)).unwrap().primes().cloned().collect();
        let candidates: Vec<BigInt> = (3u64..)
            .map(BigInt::from)
            .filter(|p| numth::is_prime(p) && !forbidden.contains(p) && sel.conditions.admits(p))
            .take(3)
            .collect();
        assert!(candidates.contains(&sel.q) || candidates.iter().all(|c| c < &sel.q));
        for q in candidates {
            let opts = ConstructOptions { q_override: Some(q.clone()), case_override: Some(sel.case) };
            let res = construct_order(&BigInt::from(d), &BigInt::from(n), &opts).unwrap_or_else(|e| panic!("({d}, {n}) q = {q}: {e}"));
            assert_eq!(res.recipe.q, q);
            assert!(verify_order(&res.order, &BigInt::from(d), &BigInt::from(n)).passed());
        }
    }
}

#[test]
fn forced_cases_still_verify() {
    let cases: [(u64, u64, CaseTag); 8] = [
        (7, 49, CaseTag::DeltaP),
        (3, 3 * 5 * 5, CaseTag::DeltaP),
        (5, 5 * 7, CaseTag::DeltaP),
        (13, 13 * 4, CaseTag::DeltaP),
        (3, 3 * 25 * 8, CaseTag::R1Only),
        (30, 30 * 7, CaseTag::C1a),
        (42, 42 * 25, CaseTag::C2),
        (2, 2 * 3 * 3, CaseTag::R1Only),
    ];
    for (d, n, case) in cases {
        let opts = ConstructOptions { q_override: None, case_override: Some(case) };
        match construct_order(&BigInt::from(d), &BigInt::from(n), &opts) {
            Ok(res) => assert!(verify_order(&res.order, &BigInt::from(d), &BigInt::from(n)).passed(), "({d}, {n}, {case})"),
            Err(ConstructError::InvalidOverride(_)) => {}
            Err(e) => panic!("({d}, {n}, {case}): {e}"),
        }
    }
}

#[test]
fn predicted_levels_match_measured_levels() {
    for (d, n) in admissible_instances(30, 200) {
        let Ok(res) = construct_order(&big(d as i64), &big(n as i64), &ConstructOptions::default()) else { continue };
        let measured: BTreeMap<u64, u32> = levels_as_u64(&res.order.per_prime_level().unwrap());
        for (p, e) in levels_as_u64(&res.predicted_local) {
            assert_eq!(measured.get(&p).copied().unwrap_or(0), e, "({d}, {n}) at {p}");
        }
    }
}

#[test]
fn large_levels() {
    for (d, n) in [(2u64, 2u64.pow(20)), (3, 3u64.pow(15)), (7 * 11 * 13, 7 * 11 * 13 * 17 * 17 * 19 * 19 * 19), (2 * 3 * 5, 2 * 3 * 5 * 64 * 27)] {
        let res = construct_order(&BigInt::from(d), &BigInt::from(n), &ConstructOptions::default())
            .unwrap_or_else(|e| panic!("({d}, {n}): {e}"));
        assert!(verify_order(&res.order, &BigInt::from(d), &BigInt::from(n)).passed(), "({d}, {n})");
    }
}
