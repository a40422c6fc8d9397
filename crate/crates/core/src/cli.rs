//! The `wickint` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or cross-check fails,
//! 2 on invalid arguments.

use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::algebra::RationalFunction;
use crate::combinatorics::Partition;
use crate::haar::{cross_check, mc_integrate};
use crate::integrator::{error_order, integrate_monomial, OrderReport};
use crate::weight::{solve_weight, verify_conditions, ConditionReport, WeightCache, WeightFunction};
use crate::wick::{gaussian_trace_moment, DeltaExpansion, Ensemble, MonomialSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const CACHE_HELP: &str = "Solved weights are cached as JSON in $WICKINT_CACHE_DIR, \
or in the platform cache directory under 'wickint' when it is unset.";

#[derive(Debug, Parser)]
#[command(name = "wickint", version, about = "Exact group integrals by weighted Wick contraction", after_help = CACHE_HELP)]
struct Cli {
    /// Cap on worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the weight function and print its coefficients.
    Weights {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Skip the on-disk weight cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Gaussian average of a product of trace invariants.
    Moment {
        /// orthogonal, unitary, coe or coe-normalized
        #[arg(long, value_parser = parse_ensemble)]
        ensemble: Ensemble,
        /// Partitions separated by '|', parts by ',', e.g. "2,1|1".
        #[arg(long)]
        invariants: String,
    },
    /// Weighted Gaussian integral of a monomial in the matrix entries.
    Integrate {
        /// orthogonal, unitary, coe or coe-normalized
        #[arg(long, value_parser = parse_ensemble)]
        ensemble: Ensemble,
        /// Weight order; 0 integrates against the plain Gaussian.
        #[arg(long)]
        kappa: u32,
        /// Factors M[i,j] or Mc[i,j] separated by spaces.
        #[arg(long)]
        monomial: String,
        /// Labels to sum over 1..N, comma separated.
        #[arg(long, value_delimiter = ',')]
        sum: Vec<String>,
        /// Also evaluate at this dimension.
        #[arg(long)]
        at: Option<u64>,
        #[arg(long, default_value = "text")]
        format: Format,
        #[arg(long)]
        no_cache: bool,
    },
    /// Check the defining conditions for k <= kappa and the error order at kappa + 1.
    Verify {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "text")]
        format: Format,
        #[arg(long)]
        no_cache: bool,
    },
    /// Monte Carlo estimate over sampled Haar or COE matrices.
    Sample {
        /// orthogonal, unitary, coe or coe-normalized
        #[arg(long, value_parser = parse_ensemble)]
        ensemble: Ensemble,
        /// Factors with concrete 1-based indices.
        #[arg(long)]
        monomial: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exact value to cross-check against, e.g. 1/8.
        #[arg(long)]
        expect: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Target {
    /// orthogonal, unitary, coe or coe-normalized
    #[arg(long, value_parser = parse_ensemble)]
    ensemble: Ensemble,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    kappa: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_ensemble(s: &str) -> Result<Ensemble, String> {
    Ensemble::from_str(s).map_err(|e| e.to_string())
}

/// Parses `"2,1|1"` into partitions.
pub fn parse_invariants(text: &str) -> Result<Vec<Partition>, String> {
    text.split('|')
        .map(|group| {
            let group = group.trim();
            if group.is_empty() {
                return Ok(Partition::empty());
            }
            let parts = group
                .split(',')
                .map(|p| p.trim().parse::<u32>().map_err(|_| format!("bad part {p:?} in {text:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            Partition::from_unsorted(parts).map_err(|e| e.to_string())
        })
        .collect()
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Failed(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs the command line on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // an already-initialized pool is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILED
        }
    }
}

fn load_weight(ensemble: Ensemble, kappa: u32, no_cache: bool) -> Result<WeightFunction, Failure> {
    if kappa == 0 {
        return Ok(WeightFunction::trivial(ensemble));
    }
    match WeightCache::from_env().filter(|_| !no_cache) {
        Some(cache) => Ok(cache.load_or_solve(ensemble, kappa)?),
        None => Ok(solve_weight(ensemble, kappa)?),
    }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Weights { target, format, no_cache } => {
            if target.kappa > 4 {
                writeln!(err, "warning: kappa = {} needs Gram entries of degree {}; this may take very long", target.kappa, 4 * target.kappa)?;
            }
            let w = load_weight(target.ensemble, target.kappa, no_cache)?;
            match format {
                Format::Json => emit_json(out, &w)?,
                Format::Text => write!(out, "{}", w.to_text())?,
            }
            Ok(EXIT_OK)
        }
        Command::Moment { ensemble, invariants } => {
            let parts = parse_invariants(&invariants).map_err(usage)?;
            writeln!(out, "{}", gaussian_trace_moment(ensemble, &parts).to_factored_string())?;
            Ok(EXIT_OK)
        }
        Command::Integrate { ensemble, kappa, monomial, sum, at, format, no_cache } => {
            let spec = MonomialSpec::parse(&monomial).map_err(usage)?.with_summed(sum);
            spec.validate(ensemble).map_err(usage)?;
            let w = load_weight(ensemble, kappa, no_cache)?;
            let result = integrate_monomial(&w, &spec)?;
            let at = at.map(|n| BigRational::from_integer(BigInt::from(n)));
            write_integral(out, &result, at.as_ref(), format)?;
            Ok(EXIT_OK)
        }
        Command::Verify { target, format, no_cache } => {
            let w = load_weight(target.ensemble, target.kappa, no_cache)?;
            let conditions = (1..=target.kappa as usize)
                .map(|k| verify_conditions(&w, k))
                .collect::<Result<Vec<ConditionReport>, _>>()?;
            let order = error_order(&w, target.kappa as usize + 1);
            let pass = conditions.iter().all(|c| c.passed) && order.passed;
            match format {
                Format::Json => emit_json(
                    out,
                    &json!({
                        "ensemble": target.ensemble,
                        "kappa": target.kappa,
                        "conditions": conditions,
                        "error_order": order,
                        "pass": pass,
                    }),
                )?,
                Format::Text => write_verify_text(out, target.ensemble, target.kappa, &conditions, &order, pass)?,
            }
            Ok(if pass { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Sample { ensemble, monomial, n, samples, seed, expect } => {
            let spec = MonomialSpec::parse(&monomial).map_err(usage)?;
            match expect {
                None => {
                    let est = mc_integrate(ensemble, &spec, n, samples, seed).map_err(usage)?;
                    emit_json(out, &est)?;
                    Ok(EXIT_OK)
                }
                Some(text) => {
                    let q = BigRational::from_str(text.trim()).map_err(|_| usage(format!("bad rational {text:?}")))?;
                    let report = cross_check(&RationalFunction::from_rational(&q), ensemble, &spec, n, samples, seed)
                        .map_err(usage)?;
                    emit_json(out, &report)?;
                    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
                }
            }
        }
    }
}

fn write_integral(
    out: &mut dyn Write,
    result: &DeltaExpansion,
    at: Option<&BigRational>,
    format: Format,
) -> Result<(), Failure> {
    let evaluated = match at {
        Some(n) => Some(
            result
                .terms()
                .map(|(p, c)| Ok((p, c.eval(n).map_err(usage)?)))
                .collect::<Result<Vec<_>, Failure>>()?,
        ),
        None => None,
    };
    match format {
        Format::Json => {
            let mut value = json!({ "expansion": result });
            if let (Some(n), Some(vals)) = (at, &evaluated) {
                value["N"] = json!(n.to_string());
                value["values"] = vals
                    .iter()
                    .map(|(p, q)| json!({ "deltas": p.pairs(), "exact": q.to_string(), "decimal": to_f64(q) }))
                    .collect();
            }
            emit_json(out, &value)?;
        }
        Format::Text => {
            match result.as_scalar() {
                Some(c) => writeln!(out, "{}", c.to_factored_string())?,
                None => writeln!(out, "{result}")?,
            }
            if let (Some(n), Some(vals)) = (at, evaluated) {
                if vals.is_empty() {
                    writeln!(out, "at N = {n}: 0")?;
                }
                for (p, q) in vals {
                    let tail = if p.is_empty() { String::new() } else { format!(" {p}") };
                    writeln!(out, "at N = {n}: {q} ({}){tail}", to_f64(&q))?;
                }
            }
        }
    }
    Ok(())
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn write_verify_text(
    out: &mut dyn Write,
    ensemble: Ensemble,
    kappa: u32,
    conditions: &[ConditionReport],
    order: &OrderReport,
    pass: bool,
) -> Result<(), Failure> {
    let word = |ok: bool| if ok { "pass" } else { "FAIL" };
    writeln!(out, "{ensemble}, kappa = {kappa}")?;
    for c in conditions {
        writeln!(out, "  k = {}: conditions hold identically: {}", c.k, word(c.passed))?;
        if !c.passed {
            for line in c.residual.to_string().lines() {
                writeln!(out, "      residual {line}")?;
            }
        }
    }
    writeln!(
        out,
        "  k = {}: error order observed {}, bound {}: {}",
        order.k,
        order.observed,
        order.bound,
        word(order.passed)
    )?;
    writeln!(out, "{}", word(pass))?;
    Ok(())
}
