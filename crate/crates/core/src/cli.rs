//! `quatorder construct | verify | classify | sweep`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 not constructible,
//! 3 invalid input.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::construct::{construct_order, select_ab, split_level, CaseTag, ConstructOptions, OrderResult};
use crate::error::ConstructError;
use crate::lattice::{hnf, OrderReport, QuatLattice};
use crate::numth;
use crate::quat::{QuatAlgebra, QuatElement};
use crate::verify::{self, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_NOT_CONSTRUCTIBLE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "quatorder", version, about = "Explicit quaternion orders of prescribed level")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an order of level N in a definite algebra of discriminant Δ.
    Construct {
        #[arg(long)]
        disc: BigInt,
        #[arg(long)]
        level: BigInt,
        /// Auxiliary prime to use instead of the default search.
        #[arg(long = "q")]
        q: Option<BigInt>,
        /// Force a dispatch case (C1a, C1b, C2, C3, C4, DELTA_P, R1_ONLY).
        #[arg(long = "case")]
        case: Option<CaseTag>,
        #[arg(long)]
        json: bool,
    },
    /// Check a lattice given by 16 rationals, or by the JSON that `construct --json` prints.
    Verify {
        /// "a,b"
        #[arg(long, allow_hyphen_values = true)]
        algebra: Option<String>,
        /// Four basis elements, row-major, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        basis: Option<String>,
        /// A file holding `construct --json` output.
        #[arg(long = "from-json")]
        from_json: Option<PathBuf>,
        #[arg(long = "expect-level")]
        expect_level: Option<BigInt>,
        /// Defaults to the discriminant of the algebra.
        #[arg(long)]
        disc: Option<BigInt>,
        #[arg(long)]
        json: bool,
    },
    /// Local behaviour of ℚ(√a) and of the algebra at every p | 2abΔN.
    Classify {
        #[arg(long)]
        disc: BigInt,
        #[arg(long)]
        level: BigInt,
        /// Defaults to the algebra `construct` would choose.
        #[arg(long, allow_hyphen_values = true)]
        algebra: Option<String>,
        #[arg(long = "q")]
        q: Option<BigInt>,
        #[arg(long = "case")]
        case: Option<CaseTag>,
        #[arg(long)]
        json: bool,
    },
    /// Construct and verify every admissible (Δ, N) in range.
    Sweep {
        #[arg(long = "max-disc")]
        max_disc: u64,
        #[arg(long = "max-level")]
        max_level: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// Integers print as JSON numbers when they fit in 64 bits, as strings otherwise.
struct JsonInt<'a>(&'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(n) => s.serialize_i64(n),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

/// Prime → exponent, keys in numeric order.
struct LocalLevels<'a>(&'a BTreeMap<BigInt, u32>);

impl Serialize for LocalLevels<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (p, e) in self.0 {
            map.serialize_entry(&p.to_string(), e)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct AlgebraJson<'a> {
    a: JsonInt<'a>,
    b: JsonInt<'a>,
}

#[derive(Serialize)]
struct RecipeJson<'a> {
    q: JsonInt<'a>,
    f: JsonInt<'a>,
    g: JsonInt<'a>,
    h: JsonInt<'a>,
    epsilon: JsonInt<'a>,
    x: JsonInt<'a>,
    t: JsonInt<'a>,
    u: JsonInt<'a>,
    z: JsonInt<'a>,
    zprime: JsonInt<'a>,
    case: CaseTag,
}

#[derive(Serialize)]
struct ConstructJson<'a> {
    algebra: AlgebraJson<'a>,
    recipe: RecipeJson<'a>,
    basis: Vec<[String; 4]>,
    denominator: JsonInt<'a>,
    level: JsonInt<'a>,
    predicted_local: LocalLevels<'a>,
    verified: bool,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    is_order: bool,
    reduced_discriminant: Option<JsonInt<'a>>,
    per_prime_level: LocalLevels<'a>,
    failures: &'a [String],
    passed: bool,
}

#[derive(Serialize)]
struct BehaviorJson {
    p: String,
    field: String,
    algebra: String,
}

fn rational_string(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

fn basis_strings(lattice: &QuatLattice) -> Vec<[String; 4]> {
    lattice.basis().iter().map(|e| e.coords().clone().map(|c| rational_string(&c))).collect()
}

/// Input problems that map to exit code 3.
#[derive(Debug)]
struct InvalidInput(String);

fn parse_algebra(text: &str) -> Result<QuatAlgebra, InvalidInput> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(InvalidInput(format!("--algebra expects \"a,b\", got {text:?}")));
    };
    let a = BigInt::from_str(a).map_err(|e| InvalidInput(format!("algebra parameter {a:?}: {e}")))?;
    let b = BigInt::from_str(b).map_err(|e| InvalidInput(format!("algebra parameter {b:?}: {e}")))?;
    QuatAlgebra::new(a, b).map_err(|e| InvalidInput(e.to_string()))
}

fn parse_rational(text: &str) -> Result<BigRational, InvalidInput> {
    let text = text.trim();
    let bad = || InvalidInput(format!("malformed rational {text:?}"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(text).map_err(|_| bad())?)),
    }
}

fn elements_from_rationals(values: Vec<BigRational>) -> Result<Vec<QuatElement>, InvalidInput> {
    if values.len() != 16 {
        return Err(InvalidInput(format!("--basis needs 16 rationals, got {}", values.len())));
    }
    Ok(values.chunks(4).map(|c| QuatElement::new([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])).collect())
}

fn parse_basis(text: &str) -> Result<Vec<QuatElement>, InvalidInput> {
    let values = text.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
    elements_from_rationals(values)
}

fn json_integer(v: &serde_json::Value, what: &str) -> Result<BigInt, InvalidInput> {
    let parsed = match v {
        serde_json::Value::Number(n) => BigInt::from_str(&n.to_string()).ok(),
        serde_json::Value::String(s) => BigInt::from_str(s).ok(),
        _ => None,
    };
    parsed.ok_or_else(|| InvalidInput(format!("{what} is not an integer: {v}")))
}

/// Algebra, basis and level from `construct --json` output.
fn parse_construct_json(text: &str) -> Result<(QuatAlgebra, Vec<QuatElement>, Option<BigInt>), InvalidInput> {
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| InvalidInput(format!("bad JSON: {e}")))?;
    let a = json_integer(&doc["algebra"]["a"], "algebra.a")?;
    let b = json_integer(&doc["algebra"]["b"], "algebra.b")?;
    let algebra = QuatAlgebra::new(a, b).map_err(|e| InvalidInput(e.to_string()))?;
    let rows = doc["basis"].as_array().ok_or_else(|| InvalidInput("basis is missing".into()))?;
    let mut values = Vec::new();
    for row in rows {
        for c in row.as_array().ok_or_else(|| InvalidInput("basis rows must be arrays".into()))? {
            let s = c.as_str().ok_or_else(|| InvalidInput(format!("basis entry {c} is not a string")))?;
            values.push(parse_rational(s)?);
        }
    }
    let level = match &doc["level"] {
        serde_json::Value::Null => None,
        v => Some(json_integer(v, "level")?),
    };
    Ok((algebra, elements_from_rationals(values)?, level))
}

fn construct_error_code(e: &ConstructError) -> i32 {
    match e {
        ConstructError::NotConstructible(_) => EXIT_NOT_CONSTRUCTIBLE,
        ConstructError::Admissibility(_)
        | ConstructError::InvalidDiscriminant(_)
        | ConstructError::InvalidOverride(_)
        | ConstructError::Quat(_) => EXIT_INVALID_INPUT,
        _ => EXIT_VERIFY_FAILED,
    }
}

fn write_construct(out: &mut dyn Write, res: &OrderResult, report: &OrderReport, json: bool) -> std::io::Result<()> {
    let r = &res.recipe;
    if json {
        let doc = ConstructJson {
            algebra: AlgebraJson { a: JsonInt(r.a()), b: JsonInt(r.b()) },
            recipe: RecipeJson {
                q: JsonInt(&r.q),
                f: JsonInt(&r.f),
                g: JsonInt(&r.g),
                h: JsonInt(&r.h),
                epsilon: JsonInt(&r.epsilon),
                x: JsonInt(&r.x),
                t: JsonInt(&r.t),
                u: JsonInt(&r.u),
                z: JsonInt(&r.z),
                zprime: JsonInt(&r.zprime),
                case: r.case,
            },
            basis: basis_strings(&res.order),
            denominator: JsonInt(res.order.denominator()),
            level: JsonInt(&res.level),
            predicted_local: LocalLevels(&res.predicted_local),
            verified: report.passed(),
        };
        writeln!(out, "{}", serde_json::to_string(&doc).expect("serializable"))?;
        return Ok(());
    }
    writeln!(out, "algebra   {}", r.algebra)?;
    writeln!(out, "case      {} (q | {})", r.case, r.q_divides)?;
    writeln!(out, "q         {}", r.q)?;
    writeln!(out, "f g h eps {} {} {} {}", r.f, r.g, r.h, r.epsilon)?;
    writeln!(out, "x t u     {} {} {}", r.x, r.t, r.u)?;
    writeln!(out, "z z'      {} {}", r.z, r.zprime)?;
    writeln!(out, "basis")?;
    for e in res.order.basis() {
        writeln!(out, "  {e}")?;
    }
    let local: Vec<String> = res.predicted_local.iter().map(|(p, e)| format!("{p}^{e}")).collect();
    writeln!(out, "level     {}  [{}]", res.level, local.join(" "))?;
    writeln!(out, "verified  {}", report.passed())?;
    for f in &report.failures {
        writeln!(out, "  failure: {f}")?;
    }
    Ok(())
}

fn write_report(out: &mut dyn Write, report: &OrderReport, json: bool) -> std::io::Result<()> {
    if json {
        let doc = ReportJson {
            is_order: report.is_order,
            reduced_discriminant: report.reduced_discriminant.as_ref().map(JsonInt),
            per_prime_level: LocalLevels(&report.per_prime_level),
            failures: &report.failures,
            passed: report.passed(),
        };
        return writeln!(out, "{}", serde_json::to_string(&doc).expect("serializable"));
    }
    writeln!(out, "order     {}", report.is_order)?;
    match &report.reduced_discriminant {
        Some(d) => writeln!(out, "level     {d}")?,
        None => writeln!(out, "level     -")?,
    }
    let local: Vec<String> = report.per_prime_level.iter().map(|(p, e)| format!("{p}^{e}")).collect();
    writeln!(out, "local     {}", local.join(" "))?;
    for f in &report.failures {
        writeln!(out, "failure   {f}")?;
    }
    writeln!(out, "{}", if report.passed() { "PASS" } else { "FAIL" })
}

fn run_construct(
    disc: BigInt,
    level: BigInt,
    q: Option<BigInt>,
    case: Option<CaseTag>,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let options = ConstructOptions { q_override: q, case_override: case };
    match construct_order(&disc, &level, &options) {
        Ok(res) => {
            let report = verify::verify_order(&res.order, &disc, &level);
            write_construct(out, &res, &report, json)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(construct_error_code(&e))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    algebra: Option<String>,
    basis: Option<String>,
    from_json: Option<PathBuf>,
    expect_level: Option<BigInt>,
    disc: Option<BigInt>,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, InvalidInput> {
    let (algebra, gens, json_level) = match (from_json, algebra, basis) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            parse_construct_json(&text)?
        }
        (None, Some(a), Some(b)) => (parse_algebra(&a)?, parse_basis(&b)?, None),
        _ => return Err(InvalidInput("verify needs either --from-json, or both --algebra and --basis".into())),
    };
    let level = expect_level
        .or(json_level)
        .ok_or_else(|| InvalidInput("verify needs --expect-level".into()))?;
    if !level.is_positive() {
        return Err(InvalidInput(format!("level {level} is not positive")));
    }
    let disc = disc.unwrap_or_else(|| algebra.discriminant());
    let report = match hnf(&algebra, &gens) {
        Ok(lattice) => verify::verify_order(&lattice, &disc, &level),
        Err(e) => OrderReport {
            is_order: false,
            reduced_discriminant: None,
            per_prime_level: BTreeMap::new(),
            failures: vec![e.to_string()],
        },
    };
    write_report(out, &report, json).map_err(|e| InvalidInput(e.to_string()))?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[allow(clippy::too_many_arguments)]
fn run_classify(
    disc: BigInt,
    level: BigInt,
    algebra: Option<String>,
    q: Option<BigInt>,
    case: Option<CaseTag>,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let algebra = match algebra {
        Some(text) => match parse_algebra(&text) {
            Ok(alg) => alg,
            Err(InvalidInput(msg)) => {
                writeln!(err, "error: {msg}")?;
                return Ok(EXIT_INVALID_INPUT);
            }
        },
        None => {
            let picked = split_level(&level, &disc).and_then(|s| select_ab(&s, q.as_ref(), case));
            match picked.and_then(|sel| Ok(QuatAlgebra::new(sel.a, sel.b)?)) {
                Ok(alg) => alg,
                Err(e) => {
                    writeln!(err, "error: {e}")?;
                    return Ok(construct_error_code(&e));
                }
            }
        }
    };
    if !disc.is_positive() || !level.is_positive() {
        writeln!(err, "error: Δ and N must be positive")?;
        return Ok(EXIT_INVALID_INPUT);
    }
    let product = algebra.a() * algebra.b() * &disc * &level * 2u32;
    let primes: BTreeSet<BigInt> = numth::factorize(&product.abs()).expect("nonzero").primes().cloned().collect();
    let mut rows = Vec::new();
    for p in &primes {
        let b = algebra.classify_prime(p).expect("prime");
        rows.push(BehaviorJson { p: p.to_string(), field: b.field_class.to_string(), algebra: b.algebra_class.to_string() });
    }
    if json {
        writeln!(out, "{}", serde_json::to_string(&rows).expect("serializable"))?;
    } else {
        writeln!(out, "{algebra}")?;
        writeln!(out, "{:>8}  {:<9} {:<9}", "p", "Q(sqrt a)", "B")?;
        for r in &rows {
            writeln!(out, "{:>8}  {:<9} {:<9}", r.p, r.field, r.algebra)?;
        }
    }
    Ok(EXIT_OK)
}

fn run_sweep(
    max_disc: u64,
    max_level: u64,
    jobs: u64,
    report_path: Option<PathBuf>,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    if max_disc < 2 {
        writeln!(err, "error: --max-disc must be at least 2")?;
        return Ok(EXIT_INVALID_INPUT);
    }
    let report: SweepReport = verify::sweep(max_disc, max_level, jobs as usize);
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    if let Some(path) = &report_path {
        if let Err(e) = std::fs::write(path, &text) {
            writeln!(err, "error: cannot write {}: {e}", path.display())?;
            return Ok(EXIT_INVALID_INPUT);
        }
    }
    if json {
        writeln!(out, "{text}")?;
    } else {
        writeln!(
            out,
            "Δ ≤ {max_disc}, N ≤ {max_level}: attempted {}, passed {}, skipped {}, failed {}",
            report.attempted,
            report.passed,
            report.skipped_not_constructible,
            report.failures.len()
        )?;
        for f in &report.failures {
            writeln!(out, "  ({}, {}): {}", f.disc, f.level, f.diagnostic)?;
        }
    }
    Ok(if report.failures.is_empty() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Construct { disc, level, q, case, json } => run_construct(disc, level, q, case, json, out, err),
        Command::Verify { algebra, basis, from_json, expect_level, disc, json } => {
            match run_verify(algebra, basis, from_json, expect_level, disc, json, out) {
                Ok(code) => Ok(code),
                Err(InvalidInput(msg)) => writeln!(err, "error: {msg}").map(|_| EXIT_INVALID_INPUT),
            }
        }
        Command::Classify { disc, level, algebra, q, case, json } => {
            run_classify(disc, level, algebra, q, case, json, out, err)
        }
        Command::Sweep { max_disc, max_level, jobs, report, json } => {
            run_sweep(max_disc, max_level, jobs, report, json, out, err)
        }
    };
    result.unwrap_or(EXIT_VERIFY_FAILED)
}
