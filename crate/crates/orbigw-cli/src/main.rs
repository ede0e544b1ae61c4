//! Command line surface for the exact rubber/relative invariant library:
//! single-value and series computations, the verification suites, and the
//! symbolic GW/DT dictionary, reported as deterministic JSON (or CSV for the
//! tabular commands).
//!
//! Exit codes: 0 success, 1 verification found a mismatch, 2 bad input.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orbigw_core::bernoulli::{
    check_exp_integral_is_s, check_odd_binomial_sum, check_reflection, BernoulliCache,
};
use orbigw_core::crepant::{
    check_change_lemma_states, check_y_matrix_inverse, crepant_verify, age, gwdt_map,
    sym_threept, CrepantReport,
};
use orbigw_core::cyclotomic::{CyclotomicNumber, FieldContext};
use orbigw_core::equivariant::EquivariantScalar;
use orbigw_core::fock::{
    check_change_lemma, check_matrix_invertible, check_root_pair_sums, check_window_bijection,
    AnBasisKey, AnLabel,
};
use orbigw_core::partition::{MonodromyVector, WeightedPartition};
use orbigw_core::pixton::{default_sample_levels, dr_stratum_agrees};
use orbigw_core::rational::Rational;
use orbigw_core::rubber::{
    gw_threept, rubber_invariant, rubber_z_series, AutConvention, DivisorKind, GapReason,
    SeriesGap, ThreePtResult,
};
use orbigw_core::series::TruncatedSeries;

#[derive(Parser)]
#[command(name = "orbigw", about = "Exact rubber/relative orbifold invariants", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format; csv only for the tabular commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Aut {
    Plain,
    Decorated,
}

impl Aut {
    fn convention(self) -> AutConvention {
        match self {
            Aut::Plain => AutConvention::Plain,
            Aut::Decorated => AutConvention::Decorated,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// One rubber invariant <mu, nu>_{g, gamma} with its dispatch branch.
    Rubber {
        #[arg(long)]
        n: u32,
        /// Decorated partition, e.g. "(2,1)(1,0)".
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        g: u32,
        /// Monodromy insertions "k1,k2,..." (empty for none).
        #[arg(long, default_value = "")]
        gamma: String,
        #[arg(long, value_enum, default_value_t = Aut::Plain)]
        aut: Aut,
    },
    /// 3-point function <mu, nu, rho> for the three special divisors rho.
    Threept {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 4)]
        zmax: u32,
        #[arg(long, default_value_t = 2)]
        xmax: u32,
    },
    /// Rubber generating function Z(z, x) for one decorated pair.
    Zseries {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long, default_value_t = 4)]
        zmax: u32,
        #[arg(long, default_value_t = 2)]
        xmax: u32,
        #[arg(long, value_enum, default_value_t = Aut::Plain)]
        aut: Aut,
    },
    /// Symmetric-product reading of a 3-point function (series + z-shift).
    Sym {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 4)]
        zmax: u32,
        #[arg(long, default_value_t = 2)]
        xmax: u32,
    },
    /// Sweep the two forms of every ramification-cycle stratum.
    VerifyPixton {
        #[arg(long, default_value_t = 2)]
        gmax: u32,
        /// Maximum number of legs.
        #[arg(long, default_value_t = 3)]
        legs: usize,
        /// Leg values range over -bound..=bound.
        #[arg(long, default_value_t = 2)]
        bound: i64,
        /// Worker threads; the report is identical for any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compare the transported rubber series against the resummed closed form.
    VerifyCrepant {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 4)]
        zmax: u32,
        #[arg(long, default_value_t = 2)]
        xmax: u32,
    },
    /// Run the standalone identity checks at one n.
    VerifyIdentities {
        #[arg(long)]
        n: u32,
    },
    /// Symbolic change-of-variables data for the DT side.
    GwdtMap {
        #[arg(long)]
        n: u32,
    },
}

fn rat_value(r: &Rational) -> Value {
    Value::String(r.to_string())
}

/// Rational values print as "p/q"; anything else as exact coordinates in the
/// power basis of the root of unity.
fn cyclo_value(c: &CyclotomicNumber) -> Value {
    match c.to_rational() {
        Ok(r) => rat_value(&r),
        Err(_) => json!({
            "order": c.context().root_order(),
            "coeffs": c.coords().iter().map(rat_value).collect::<Vec<_>>(),
        }),
    }
}

fn scalar_value(v: &EquivariantScalar) -> Value {
    json!({ "c0": cyclo_value(v.c0()), "c1T": cyclo_value(v.c1()) })
}

fn series_value(s: &TruncatedSeries<EquivariantScalar>) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(mono, c)| {
            json!({ "z": mono.z, "x": mono.x, "coeff": scalar_value(c) })
        })
        .collect();
    Value::Array(terms)
}

fn gaps_value(gaps: &[SeriesGap]) -> Value {
    let rows: Vec<Value> = gaps
        .iter()
        .map(|gap| {
            json!({
                "g": gap.g,
                "gamma": gap.gamma.format(),
                "reason": match gap.reason {
                    GapReason::Unstable => "unstable",
                    GapReason::Smooth => "smooth",
                },
            })
        })
        .collect();
    Value::Array(rows)
}

fn an_key_value(key: &AnBasisKey) -> Value {
    let rows: Vec<Value> = key
        .iter()
        .map(|(size, label)| match label {
            AnLabel::Unit => json!({ "size": size, "label": "unit" }),
            AnLabel::Point(j) => json!({ "size": size, "label": j }),
        })
        .collect();
    Value::Array(rows)
}

fn cyclo_csv(c: &CyclotomicNumber) -> String {
    match c.to_rational() {
        Ok(r) => r.to_string(),
        Err(_) => c.format_omega(),
    }
}

/// Series as a CSV table: one row per monomial, exact cells.
fn series_csv(s: &TruncatedSeries<EquivariantScalar>, nvars: usize) -> String {
    let mut out = String::from("z");
    for a in 1..=nvars {
        out.push_str(&format!(",x{a}"));
    }
    out.push_str(",c0,c1T\n");
    for (mono, c) in s.terms() {
        out.push_str(&mono.z.to_string());
        for e in &mono.x {
            out.push_str(&format!(",{e}"));
        }
        out.push_str(&format!(",{},{}\n", cyclo_csv(c.c0()), cyclo_csv(c.c1())));
    }
    out
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn parse_partition(s: &str, n: u32, what: &str) -> Result<WeightedPartition, Failure> {
    WeightedPartition::parse(s, n).map_err(|e| invalid(format!("bad {what}: {e}")))
}

fn parse_gamma(s: &str, n: u32) -> Result<MonodromyVector, Failure> {
    MonodromyVector::parse(s, n).map_err(|e| invalid(format!("bad gamma: {e}")))
}

fn require_n(n: u32) -> Result<Arc<FieldContext>, Failure> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(FieldContext::new(n))
}

fn threept_for(
    ctx: &Arc<FieldContext>,
    m: u64,
    mu: &str,
    nu: &str,
    rho: &str,
    zmax: u32,
    xmax: u32,
) -> Result<(ThreePtResult, WeightedPartition, WeightedPartition, WeightedPartition), Failure> {
    let n = ctx.n();
    let mu = parse_partition(mu, n, "mu")?;
    let nu = parse_partition(nu, n, "nu")?;
    let rho = parse_partition(rho, n, "rho")?;
    if mu.size() != m || nu.size() != m || rho.size() != m {
        return Err(invalid(format!(
            "all partitions must have size m = {m} (got {}, {}, {})",
            mu.size(),
            nu.size(),
            rho.size()
        )));
    }
    let r = gw_threept(ctx, &mu, &nu, &rho, zmax, xmax, AutConvention::Plain)
        .map_err(|e| invalid(format!("{e}")))?;
    Ok((r, mu, nu, rho))
}

/// Pixton sweep task list, in a fixed order so any chunking reproduces the
/// same report.
fn pixton_tasks(gmax: u32, legs: usize, bound: i64) -> Vec<(u32, Vec<i64>, u32)> {
    let mut tasks = Vec::new();
    for g in 0..=gmax {
        for nlegs in 1..=legs {
            let mut cur = vec![0i64; nlegs];
            loop {
                if cur.iter().sum::<i64>() == 0 {
                    for f in 0..=g {
                        tasks.push((g, cur.clone(), f));
                    }
                }
                // Odometer over -bound..=bound per slot.
                let mut idx = 0;
                loop {
                    if idx == nlegs {
                        break;
                    }
                    if cur[idx] < bound {
                        cur[idx] += 1;
                        break;
                    }
                    cur[idx] = -bound;
                    idx += 1;
                }
                if idx == nlegs {
                    break;
                }
            }
        }
    }
    tasks
}

fn run_pixton(gmax: u32, legs: usize, bound: i64, jobs: usize) -> (Value, u8) {
    let tasks = pixton_tasks(gmax, legs, bound);
    let jobs = jobs.max(1).min(tasks.len().max(1));
    let mut results: Vec<Option<Result<bool, String>>> = vec![None; tasks.len()];
    std::thread::scope(|scope| {
        let chunks: Vec<_> = results.chunks_mut(tasks.len().div_ceil(jobs)).collect();
        let mut offset = 0;
        for chunk in chunks {
            let len = chunk.len();
            let slice = &tasks[offset..offset + len];
            offset += len;
            scope.spawn(move || {
                for (slot, (g, a, f)) in chunk.iter_mut().zip(slice) {
                    let levels = default_sample_levels(*g, a);
                    *slot = Some(
                        dr_stratum_agrees(*g, a, *f, &levels).map_err(|e| format!("{e}")),
                    );
                }
            });
        }
    });
    let mut failures = Vec::new();
    for ((g, a, f), res) in tasks.iter().zip(&results) {
        match res.as_ref().expect("all tasks ran") {
            Ok(true) => {}
            Ok(false) => failures.push(json!({ "g": g, "a": a, "f": f, "error": "mismatch" })),
            Err(e) => failures.push(json!({ "g": g, "a": a, "f": f, "error": e })),
        }
    }
    let code = u8::from(!failures.is_empty());
    (
        json!({
            "checked": tasks.len(),
            "failures": failures,
        }),
        code,
    )
}

fn crepant_report_value(report: &CrepantReport) -> Value {
    let mismatches: Vec<Value> = report
        .mismatches
        .iter()
        .map(|mm| {
            json!({
                "mu_key": an_key_value(&mm.mu_key),
                "nu_key": an_key_value(&mm.nu_key),
                "monomial": { "z": mm.monomial.z, "x": mm.monomial.x },
                "orbifold": scalar_value(&mm.orbifold),
                "resolution": scalar_value(&mm.resolution),
            })
        })
        .collect();
    json!({
        "compared": report.compared,
        "equal": report.equal,
        "excluded_constants": report.excluded_constants,
        "table_checked": report.table_checked,
        "mismatches": mismatches,
    })
}

fn identity_checks(n: u32) -> Vec<(&'static str, bool)> {
    let ctx = FieldContext::new(n);
    let cache = BernoulliCache::new(14);
    let mut checks = vec![
        ("bernoulli_b1", cache.number(1) == &Rational::new(-1, 2)),
        (
            "bernoulli_reflection_m_le_12",
            (0..=12).all(|m| check_reflection(&cache, m)),
        ),
        (
            "odd_factorial_m_le_12",
            (1..=12).all(check_odd_binomial_sum),
        ),
        ("exp_integral_is_s_z20", check_exp_integral_is_s(20)),
        ("root_pair_sums", check_root_pair_sums(&ctx)),
        ("change_lemma_variables", check_change_lemma(&ctx)),
        (
            "change_lemma_coefficients",
            check_change_lemma_states(&ctx, 1) && check_change_lemma_states(&ctx, 2),
        ),
        ("window_bijection", check_window_bijection(n)),
        ("matrix_invertible", check_matrix_invertible(&ctx)),
        ("y_matrix_inverse", check_y_matrix_inverse(&ctx)),
    ];
    checks.shrink_to_fit();
    checks
}

fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Rubber {
            n,
            mu,
            nu,
            g,
            gamma,
            aut,
        } => {
            if csv {
                return Err(invalid("csv output not supported for rubber"));
            }
            let ctx = require_n(*n)?;
            let mu = parse_partition(mu, *n, "mu")?;
            let nu = parse_partition(nu, *n, "nu")?;
            let gamma = parse_gamma(gamma, *n)?;
            let r = rubber_invariant(&ctx, &mu, &nu, *g, &gamma, aut.convention())
                .map_err(|e| invalid(format!("{e}")))?;
            let v = json!({
                "value": scalar_value(&r.value),
                "branch": r.branch.to_string(),
            });
            Ok((v.to_string(), 0))
        }
        Command::Threept {
            n,
            m,
            mu,
            nu,
            rho,
            zmax,
            xmax,
        } => {
            let ctx = require_n(*n)?;
            let (r, ..) = threept_for(&ctx, *m, mu, nu, rho, *zmax, *xmax)?;
            if csv {
                return Ok((series_csv(&r.series, *n as usize), 0));
            }
            // The identity divisor is a bare constant; report just the value.
            if r.kind == DivisorKind::Identity {
                let c = r.series.constant_term();
                return Ok((cyclo_value(c.c0()).to_string(), 0));
            }
            let mut v = json!({
                "kind": match r.kind {
                    DivisorKind::Identity => unreachable!(),
                    DivisorKind::SubDivisor => "SubDivisor",
                    DivisorKind::Twisted(_) => "Twisted",
                },
                "series": series_value(&r.series),
                "gaps": gaps_value(&r.gaps),
            });
            if let DivisorKind::Twisted(k) = r.kind {
                v["k"] = json!(k);
            }
            if r.smooth_scope_note {
                v["smooth_scope_note"] = json!(true);
            }
            Ok((v.to_string(), 0))
        }
        Command::Zseries {
            n,
            mu,
            nu,
            zmax,
            xmax,
            aut,
        } => {
            let ctx = require_n(*n)?;
            let mu = parse_partition(mu, *n, "mu")?;
            let nu = parse_partition(nu, *n, "nu")?;
            let (z, gaps) = rubber_z_series(&ctx, &mu, &nu, *zmax, *xmax, aut.convention())
                .map_err(|e| invalid(format!("{e}")))?;
            if csv {
                return Ok((series_csv(&z, *n as usize), 0));
            }
            let v = json!({
                "mu": mu.format(),
                "nu": nu.format(),
                "terms": series_value(&z),
                "gaps": gaps_value(&gaps),
            });
            Ok((v.to_string(), 0))
        }
        Command::Sym {
            n,
            m,
            mu,
            nu,
            rho,
            zmax,
            xmax,
        } => {
            let ctx = require_n(*n)?;
            let (r, mu, nu, rho) = threept_for(&ctx, *m, mu, nu, rho, *zmax, *xmax)?;
            let s = sym_threept(&r.series, mu.len(), nu.len(), rho.len(), *m);
            if csv {
                return Ok((series_csv(&s.series, *n as usize), 0));
            }
            let v = json!({
                "zshift": s.zshift,
                "ages": {
                    "mu": age(&mu, *m),
                    "nu": age(&nu, *m),
                    "rho": age(&rho, *m),
                },
                "series": series_value(&s.series),
                "gaps": gaps_value(&r.gaps),
            });
            Ok((v.to_string(), 0))
        }
        Command::VerifyPixton {
            gmax,
            legs,
            bound,
            jobs,
        } => {
            if csv {
                return Err(invalid("csv output not supported for verify-pixton"));
            }
            if *legs == 0 || *bound < 0 {
                return Err(invalid("need at least one leg and a nonnegative bound"));
            }
            let (v, code) = run_pixton(*gmax, *legs, *bound, *jobs);
            Ok((v.to_string(), code))
        }
        Command::VerifyCrepant { n, m, zmax, xmax } => {
            if csv {
                return Err(invalid("csv output not supported for verify-crepant"));
            }
            let ctx = require_n(*n)?;
            if *m == 0 {
                return Err(invalid("m must be at least 1"));
            }
            let report = crepant_verify(&ctx, *m, *zmax, *xmax);
            let code = u8::from(!report.passed());
            Ok((crepant_report_value(&report).to_string(), code))
        }
        Command::VerifyIdentities { n } => {
            let checks = identity_checks(*n);
            if *n == 0 {
                return Err(invalid("n must be at least 1"));
            }
            let all = checks.iter().all(|(_, ok)| *ok);
            if csv {
                let mut out = String::from("check,pass\n");
                for (name, ok) in &checks {
                    out.push_str(&format!("{name},{ok}\n"));
                }
                return Ok((out, u8::from(!all)));
            }
            let rows: Vec<Value> = checks
                .iter()
                .map(|(name, ok)| json!({ "name": name, "pass": ok }))
                .collect();
            let v = json!({ "n": n, "checks": rows, "all_pass": all });
            Ok((v.to_string(), u8::from(!all)))
        }
        Command::GwdtMap { n } => {
            if csv {
                return Err(invalid("csv output not supported for gwdt-map"));
            }
            let ctx = require_n(*n)?;
            let map = gwdt_map(&ctx);
            let rows: Vec<Value> = map
                .y_rows
                .iter()
                .map(|row| Value::Array(row.iter().map(cyclo_value).collect()))
                .collect();
            let v = json!({
                "n": map.n,
                "y_rows": rows,
                "q_vars": "q_j = zeta * exp(y_j)",
                "q_total": map.q_total,
                "q_zero": map.q_zero,
                "prefactor": map.prefactor,
                "sign": map.sign,
            });
            Ok((v.to_string(), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((mut text, code)) => {
            if !text.ends_with('\n') {
                text.push('\n');
            }
            let written = match &cli.output {
                Some(path) => fs::write(path, &text).map_err(|e| e.to_string()),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
