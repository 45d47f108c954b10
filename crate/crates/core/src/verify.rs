//! Independent checks on a lattice, and the batch sweep over (Δ, N).

use num_bigint::BigInt;
use serde::Serialize;

use crate::construct::{construct_order, Certificate, ConstructOptions};
use crate::error::ConstructError;
use crate::lattice::{OrderReport, QuatLattice};
use crate::numth;

/// Order axioms, level, ramification and per-prime agreement. Every failure
/// is collected; nothing short-circuits except what cannot be computed.
pub fn verify_order(lattice: &QuatLattice, disc: &BigInt, level: &BigInt) -> OrderReport {
    let mut failures = lattice.order_failures();
    let is_order = failures.is_empty();

    let ramified = lattice.algebra().ramified_primes();
    let expected: Vec<BigInt> = match numth::factorize(disc) {
        Ok(fac) => fac.primes().cloned().collect(),
        Err(e) => {
            failures.push(format!("discriminant {disc}: {e}"));
            Vec::new()
        }
    };
    if ramified != expected {
        let show = |ps: &[BigInt]| ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        failures.push(format!("algebra ramifies at {{{}}}, expected {{{}}}", show(&ramified), show(&expected)));
    }

    if !is_order {
        return OrderReport { is_order, reduced_discriminant: None, per_prime_level: Default::default(), failures };
    }
    let reduced_discriminant = match lattice.reduced_discriminant() {
        Ok(d) => Some(d),
        Err(e) => {
            failures.push(e.to_string());
            None
        }
    };
    let per_prime_level = match lattice.per_prime_level() {
        Ok(m) => m,
        Err(e) => {
            failures.push(e.to_string());
            Default::default()
        }
    };
    if let Some(d) = &reduced_discriminant {
        if d != level {
            failures.push(format!("reduced discriminant {d} is not the level {level}"));
        }
        let rebuilt: BigInt = per_prime_level.iter().map(|(p, e)| num_traits::pow(p.clone(), *e as usize)).product();
        if &rebuilt != d {
            failures.push(format!("per-prime levels multiply to {rebuilt}, reduced discriminant is {d}"));
        }
        if level > &BigInt::from(0) {
            if let Ok(fac) = numth::factorize(level) {
                for (p, e) in fac.factors() {
                    let got = per_prime_level.get(p).copied().unwrap_or(0);
                    if got != *e {
                        failures.push(format!("level exponent at {p} is {got}, expected {e}"));
                    }
                }
            }
        }
    }
    OrderReport { is_order, reduced_discriminant, per_prime_level, failures }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepFailure {
    pub disc: u64,
    pub level: u64,
    pub diagnostic: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub range: (u64, u64),
    pub attempted: usize,
    pub passed: usize,
    pub skipped_not_constructible: usize,
    pub failures: Vec<SweepFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceOutcome {
    Passed,
    Skipped(Certificate),
    Failed(String),
}

/// Squarefree Δ ≤ max_disc with an odd number of primes, and N ≤ max_level with Δ | N, N > 1.
pub fn admissible_instances(max_disc: u64, max_level: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for disc in 2..=max_disc {
        let fac = numth::factorize(&BigInt::from(disc)).expect("positive");
        if !fac.is_squarefree() || fac.num_primes().is_multiple_of(2) {
            continue;
        }
        out.extend((disc..=max_level).step_by(disc as usize).map(|level| (disc, level)));
    }
    out
}

/// Construct, then verify independently. A skip needs a certificate that
/// re-checks from (Δ, N) alone.
pub fn check_instance(disc: u64, level: u64) -> InstanceOutcome {
    let (d, n) = (BigInt::from(disc), BigInt::from(level));
    match construct_order(&d, &n, &ConstructOptions::default()) {
        Ok(res) => {
            let report = verify_order(&res.order, &d, &n);
            if report.passed() {
                InstanceOutcome::Passed
            } else {
                InstanceOutcome::Failed(report.failures.join("; "))
            }
        }
        Err(ConstructError::NotConstructible(cert)) if cert.holds() => InstanceOutcome::Skipped(cert),
        Err(e) => InstanceOutcome::Failed(e.to_string()),
    }
}

/// Applies `f` to every instance, keeping input order. Uses a pool of
/// `workers` threads when the `parallel` feature is on and `workers > 1`.
pub fn map_instances<T, F>(instances: &[(u64, u64)], workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
        return pool.install(|| instances.par_iter().map(|&(d, n)| f(d, n)).collect());
    }
    let _ = workers;
    instances.iter().map(|&(d, n)| f(d, n)).collect()
}

fn reduce(range: (u64, u64), instances: &[(u64, u64)], outcomes: Vec<InstanceOutcome>) -> SweepReport {
    let mut report =
        SweepReport { range, attempted: instances.len(), passed: 0, skipped_not_constructible: 0, failures: Vec::new() };
    for (&(disc, level), outcome) in instances.iter().zip(outcomes) {
        match outcome {
            InstanceOutcome::Passed => report.passed += 1,
            InstanceOutcome::Skipped(_) => report.skipped_not_constructible += 1,
            InstanceOutcome::Failed(diagnostic) => report.failures.push(SweepFailure { disc, level, diagnostic }),
        }
    }
    report
}

pub fn sweep(max_disc: u64, max_level: u64, workers: usize) -> SweepReport {
    let instances = admissible_instances(max_disc, max_level);
    let outcomes = map_instances(&instances, workers, check_instance);
    reduce((max_disc, max_level), &instances, outcomes)
}

pub fn sweep_sequential(max_disc: u64, max_level: u64) -> SweepReport {
    let instances = admissible_instances(max_disc, max_level);
    let outcomes = instances.iter().map(|&(d, n)| check_instance(d, n)).collect();
    reduce((max_disc, max_level), &instances, outcomes)
}
