use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use quatorder::numth::{self, CongruenceSystem, Place};

const SMALL_PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn euler_criterion(a: i64, p: u64) -> i8 {
    let r = big(a).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p)).mod_floor(&BigInt::from(p));
    if r.is_zero() {
        0
    } else if r.is_one() {
        1
    } else {
        -1
    }
}

/// z² ≡ a·x² + b·y² (mod p³) with (x, y, z) not all divisible by p.
/// For odd p and v_p(a), v_p(b) ≤ 1 this decides local solvability.
fn isotropic_mod_p_cubed(a: i64, b: i64, p: i64) -> bool {
    let m = p * p * p;
    let mut unit_squares = vec![false; m as usize];
    let mut squares = vec![false; m as usize];
    for z in 0..m {
        let s = (z * z) % m;
        squares[s as usize] = true;
        if z % p != 0 {
            unit_squares[s as usize] = true;
        }
    }
    for x in 0..m {
        for y in 0..m {
            let v = (a * x % m * x % m + b * y % m * y % m).rem_euclid(m) as usize;
            let primitive_xy = x % p != 0 || y % p != 0;
            if (primitive_xy && squares[v]) || unit_squares[v] {
                return true;
            }
        }
    }
    false
}

fn strip_squares(mut n: i64, p: i64) -> i64 {
    while n % (p * p) == 0 {
        n /= p * p;
    }
    n
}

fn places_of(a: &BigInt, b: &BigInt) -> Vec<Place> {
    let fac = numth::factorize(&(a * b * 2u32).abs()).unwrap();
    fac.primes().cloned().map(Place::Prime).chain([Place::Infinity]).collect()
}

#[test]
fn two_adic_symbol_against_two_follows_mod_8() {
    for a in (-399i64..400).filter(|a| a % 2 != 0) {
        let expected = if matches!(a.rem_euclid(8), 1 | 7) { 1 } else { -1 };
        assert_eq!(numth::hilbert_symbol(&big(a), &big(2), &Place::from(2)).unwrap(), expected, "a = {a}");
    }
}

#[test]
fn product_formula_on_1000_pairs() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let pair = (-1_000_000i64..1_000_000, -1_000_000i64..1_000_000).prop_filter("nonzero", |(a, b)| *a != 0 && *b != 0);
    for _ in 0..1000 {
        let (a, b) = pair.new_tree(&mut runner).unwrap().current();
        let (a, b) = (big(a), big(b));
        let product: i8 = places_of(&a, &b).iter().map(|v| numth::hilbert_symbol(&a, &b, v).unwrap()).product();
        assert_eq!(product, 1, "({a}, {b})");
    }
}

#[test]
fn odd_symbol_matches_isotropy_search_on_200_triples() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let triple = (prop::sample::select(vec![3i64, 5, 7]), -500i64..500, -500i64..500)
        .prop_filter("nonzero", |(_, a, b)| *a != 0 && *b != 0);
    for _ in 0..200 {
        let (p, a, b) = triple.new_tree(&mut runner).unwrap().current();
        let (a, b) = (strip_squares(a, p), strip_squares(b, p));
        let expected = if isotropic_mod_p_cubed(a, b, p) { 1 } else { -1 };
        let got = numth::hilbert_symbol(&big(a), &big(b), &Place::from(p as u64)).unwrap();
        assert_eq!(got, expected, "({a}, {b})_{p}");
    }
}

#[test]
fn primality_matches_trial_division() {
    for n in 0u64..5000 {
        let expected = n >= 2 && trial_division(n) == vec![(n, 1)];
        assert_eq!(numth::is_prime(&BigInt::from(n)), expected, "{n}");
    }
    // Carmichael numbers and a strong pseudoprime to several bases
    for n in [561u64, 1105, 1729, 2465, 2821, 6601, 3215031751] {
        assert!(!numth::is_prime(&BigInt::from(n)), "{n}");
    }
    assert!(numth::is_prime(&BigInt::from(1_000_000_007u64)));
    assert!(numth::is_prime(&BigInt::from(18446744073709551557u64)));
}

proptest! {
    #[test]
    fn factorize_round_trips(n in 1u64..100_000) {
        let fac = numth::factorize(&BigInt::from(n)).unwrap();
        let got: Vec<(u64, u32)> = fac.factors().iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
        prop_assert_eq!(got, trial_division(n));
        let rebuilt: BigInt = fac.factors().iter().map(|(p, e)| num_traits::pow(p.clone(), *e as usize)).product();
        prop_assert_eq!(rebuilt, BigInt::from(n));
    }

    #[test]
    fn factorize_semiprimes(i in 0usize..6, j in 0usize..6) {
        let ps = [1_000_003u64, 1_000_033, 998_244_353, 1_000_000_007, 2_147_483_647, 4_294_967_291];
        let n = BigInt::from(ps[i]) * BigInt::from(ps[j]);
        let fac = numth::factorize(&n).unwrap();
        let primes: BTreeSet<u64> = fac.primes().map(|p| p.to_u64().unwrap()).collect();
        prop_assert_eq!(primes, [ps[i], ps[j]].into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn legendre_is_euler(a in -10_000i64..10_000, pi in 0usize..SMALL_PRIMES.len()) {
        let p = SMALL_PRIMES[pi];
        prop_assert_eq!(numth::legendre(&big(a), &BigInt::from(p)).unwrap(), euler_criterion(a, p));
    }

    #[test]
    fn sqrt_is_least_root(a in 0i64..10_000, pi in 0usize..SMALL_PRIMES.len()) {
        let p = SMALL_PRIMES[pi] as i64;
        let brute = (1..p).find(|x| (x * x - a).rem_euclid(p) == 0);
        match numth::sqrt_mod(&big(a), &big(p)) {
            Ok(r) => prop_assert_eq!(Some(r.to_i64().unwrap()), brute),
            Err(_) => prop_assert_eq!(brute, None),
        }
    }

    #[test]
    fn sqrt_for_large_primes(x in 1u64..1_000_000_000) {
        let p = BigInt::from(1_000_000_007u64);
        let a = (BigInt::from(x) * BigInt::from(x)).mod_floor(&p);
        let r = numth::sqrt_mod(&a, &p).unwrap();
        prop_assert_eq!((&r * &r).mod_floor(&p), a);
        prop_assert!(r <= &p - &r);
    }

    #[test]
    fn bezout_identity(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
        prop_assume!(a != 0 || b != 0);
        let (g, s, t) = numth::ext_gcd(&big(a), &big(b)).unwrap();
        prop_assert_eq!(&g, &big(a).gcd(&big(b)));
        prop_assert_eq!(&s * big(a) + &t * big(b), g);
    }

    #[test]
    fn crt_solves_every_congruence(r1 in 0i64..1000, r2 in 0i64..1000, i in 0usize..6, j in 0usize..6) {
        let mods = [8i64, 9, 25, 7, 11, 13];
        prop_assume!(i != j);
        let sys = CongruenceSystem::new().with(r1, mods[i]).unwrap().with(r2, mods[j]).unwrap();
        let (x, m) = numth::crt(&sys).unwrap();
        prop_assert_eq!(m, big(mods[i] * mods[j]));
        prop_assert!(x >= BigInt::zero() && x < big(mods[i] * mods[j]));
        prop_assert!(sys.is_satisfied_by(&x));
    }

    #[test]
    fn prime_search_lands_in_class(r in 1i64..120, m in 2i64..120) {
        prop_assume!(r.gcd(&m) == 1);
        let sys = CongruenceSystem::new().with(r, m).unwrap();
        let forbidden: BTreeSet<BigInt> = [big(2), big(3)].into_iter().collect();
        let q = numth::find_prime(&sys, &forbidden).unwrap();
        prop_assert!(sys.is_satisfied_by(&q));
        prop_assert!(numth::is_prime(&q) && !forbidden.contains(&q));
        let below = (2..q.to_i64().unwrap()).filter(|n| n % m == r % m && numth::is_prime(&big(*n)) && *n != 2 && *n != 3).count();
        prop_assert_eq!(below, 0);
    }
}
