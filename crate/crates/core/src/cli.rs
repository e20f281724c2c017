//! Command-line driver. Every command prints one report; `verify` exits 1 when a check fails.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num::Zero;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::AnyMetrized;
use crate::cayley_dickson::{hurwitz_dim, HMatrix};
use crate::error::{Error, Result};
use crate::identities::{check_identity, DefectReport, Identity};
use crate::io::{self, Format, Report};
use crate::optimize::{default_seed, parse_seed, OptimizerConfig};
use crate::presets::{self, PresetDescriptor};
use crate::scalar::{format_rational, parse_rational, Rat, Scalar};
use crate::sectional;
use crate::special::{self, SearchConfig, SpecialKind};
use crate::verify;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "alg-lab", version, about = "Explore metrized nonassociative algebras")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

fn seed_arg(s: &str) -> std::result::Result<u64, String> {
    parse_seed(s).ok_or_else(|| format!("not a seed: {s}"))
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// RNG seed, decimal or 0x hex; defaults to ALG_LAB_SEED or 0x5EC7.
    #[arg(long, value_parser = seed_arg)]
    pub seed: Option<u64>,
}

impl SeedArg {
    fn get(&self) -> u64 {
        self.seed.unwrap_or_else(default_seed)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the preset catalog.
    ListPresets,
    /// Write a preset as an algebra file (to stdout without --out).
    Build {
        address: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimension, metric signature and invariance, optional identity battery.
    Info {
        src: String,
        #[arg(long)]
        identities: bool,
    },
    /// Sectional nonassociativity of the plane spanned by x and y.
    Sect {
        src: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Decides whether sect is constant and returns the constant.
    ConstantSect { src: String },
    /// Multi-start estimates of the infimum and supremum of sect.
    Extrema {
        src: String,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Commutator-norm constant of the product with respect to the metric.
    Bw {
        src: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Newton search for idempotents.
    Idempotents(SearchArgs),
    /// Search for square-zero rays.
    SquareZero(SearchArgs),
    /// Spectrum of L(e) on the orthogonal complement of e.
    Spectrum {
        src: String,
        #[arg(long, allow_hyphen_values = true)]
        e: String,
    },
    /// Run a reproduction suite.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub src: String,
    #[arg(long, default_value_t = 256)]
    pub starts: usize,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Search the complexification instead.
    #[arg(long)]
    pub complex: bool,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Idempotents and square-zero elements of the three-dimensional family.
    Table1 {
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, default_value_t = 256)]
        starts: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Sharp sect bounds on Hermitian matrices.
    HermBounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Commutator-norm constant of a full matrix algebra.
    BwMat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Para-octonion and Okubo bounds.
    SymmetricComposition {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Identity battery on the standard presets.
    Identities,
    /// Curvature identities on random rational algebras.
    Bianchi {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Consequences of nonnegative sect for idempotents and square-zero elements.
    Norton {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 256)]
        starts: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Commutator bounds against diagonal matrices.
    Cdk {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// A resolved `<src>`: a preset address or an algebra file.
struct Source {
    metrized: AnyMetrized,
    descriptor: Option<PresetDescriptor>,
}

impl Source {
    fn herm_shape(&self) -> Option<(usize, u32)> {
        let d = self.descriptor.as_ref()?;
        if d.name != "herm" || d.params.contains_key("derived") {
            return None;
        }
        Some((d.params.get("n")?.parse().ok()?, d.params.get("level")?.parse().ok()?))
    }
}

fn resolve(src: &str) -> Result<Source> {
    if Path::new(src).is_file() {
        let loaded = io::load(Path::new(src))?;
        return Ok(Source { metrized: loaded.metrized()?, descriptor: None });
    }
    let p = presets::from_address(src)?;
    Ok(Source { metrized: p.metrized, descriptor: Some(p.descriptor) })
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn bad(lit: &str, why: &str) -> Error {
    Error::InvalidParams(format!("element `{lit}`: {why}"))
}

fn rational(lit: &str, s: &str) -> Result<Rat> {
    parse_rational(s).ok_or_else(|| bad(lit, &format!("not a number: {}", s.trim())))
}

/// Parses an element literal: comma-separated coordinates, or for Hermitian presets a sum
/// of `[c*]diag(d1,…,dn)` and `[c*]sym(i,j)` terms (`sym(i,j) = e_ij + e_ji`, 1-based).
pub fn parse_element(lit: &str, dim: usize, herm: Option<(usize, u32)>) -> Result<Vec<Rat>> {
    let t = lit.trim();
    if !t.contains('(') {
        let v = t.split(',').map(|s| rational(lit, s)).collect::<Result<Vec<_>>>()?;
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        return Ok(v);
    }
    let (n, level) = herm.ok_or_else(|| bad(lit, "diag/sym literals need a Hermitian preset"))?;
    let d = hurwitz_dim(level);
    let real = |r: Rat| {
        let mut u = vec![Rat::zero(); d];
        u[0] = r;
        u
    };
    let mut acc = HMatrix::<Rat>::zero(n, level);
    for term in split_top(t, '+') {
        let term = term.trim();
        let (coef, body) = match split_top(term, '*').as_slice() {
            [b] => (Rat::from_integer(1.into()), *b),
            [c, b] => (rational(lit, c)?, *b),
            _ => return Err(bad(lit, "malformed term")),
        };
        let body = body.trim();
        let (head, args) = body
            .strip_suffix(')')
            .and_then(|b| b.split_once('('))
            .ok_or_else(|| bad(lit, &format!("malformed term {body}")))?;
        let mut m = HMatrix::<Rat>::zero(n, level);
        match head.trim() {
            "diag" => {
                let v = args.split(',').map(|s| rational(lit, s)).collect::<Result<Vec<_>>>()?;
                if v.len() != n {
                    return Err(bad(lit, &format!("diag needs {n} entries")));
                }
                for (i, x) in v.into_iter().enumerate() {
                    m.set(i, i, real(x));
                }
            }
            "sym" => {
                let idx: Vec<usize> = args
                    .split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| bad(lit, "sym indices must be integers")))
                    .collect::<Result<_>>()?;
                let [i, j] = idx[..] else { return Err(bad(lit, "sym takes two indices")) };
                if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
                    return Err(bad(lit, &format!("sym indices must lie in 1..={n}")));
                }
                m = HMatrix::unit(n, level, i - 1, j - 1, 0).add(&HMatrix::unit(n, level, j - 1, i - 1, 0));
            }
            other => return Err(bad(lit, &format!("unknown form {other}"))),
        }
        acc = acc.add(&m.scale(&coef));
    }
    let v = presets::herm_coords(&acc);
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    Ok(v)
}

fn floats(v: &[Rat]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

#[derive(Serialize)]
struct SectResult {
    value: f64,
    exact: Option<String>,
}

#[derive(Serialize)]
struct ConstantResult {
    constant: Option<String>,
    exact: bool,
}

#[derive(Serialize)]
struct InfoResult {
    dim: usize,
    mode: String,
    labels: Option<Vec<String>>,
    preset: Option<PresetDescriptor>,
    metric: crate::algebra::MetricReport,
    commutative: bool,
    anticommutative: bool,
    identities: Option<Vec<DefectReport>>,
}

fn info(src: &Source, with_identities: bool) -> InfoResult {
    fn battery<T: Scalar>(a: &crate::algebra::Algebra<T>) -> Vec<DefectReport> {
        Identity::ALL.iter().map(|&id| check_identity(a, id)).collect()
    }
    let m = &src.metrized;
    let (labels, commutative, anticommutative, identities) = match m {
        AnyMetrized::Rational(q) => {
            let a = q.algebra();
            (a.labels().map(<[String]>::to_vec), a.is_commutative(), a.is_anticommutative(), with_identities.then(|| battery(a)))
        }
        AnyMetrized::Float(f) => {
            let a = f.algebra();
            (a.labels().map(<[String]>::to_vec), a.is_commutative(), a.is_anticommutative(), with_identities.then(|| battery(a)))
        }
    };
    InfoResult {
        dim: m.dim(),
        mode: m.mode().to_string(),
        labels,
        preset: src.descriptor.clone(),
        metric: m.report().clone(),
        commutative,
        anticommutative,
        identities,
    }
}

enum Outcome {
    Report(String, bool),
    Raw(String),
}

fn emit<R: Serialize>(format: Format, command: &str, input: Option<&str>, seed: Option<u64>, config: Value, result: R) -> Result<Outcome> {
    Ok(Outcome::Report(Report::new(command, input, seed, config, result).render(format)?, true))
}

fn suite(format: Format, name: &str, seed: Option<u64>, config: Value, r: verify::SuiteReport) -> Result<Outcome> {
    let passed = r.passed;
    let text = Report::new(&format!("verify {name}"), None, seed, config, r).render(format)?;
    Ok(Outcome::Report(text, passed))
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::ListPresets => {
            let rows: Vec<Value> = presets::CATALOG
                .iter()
                .map(|(n, p, d)| json!({"name": n, "params": p, "description": d}))
                .collect();
            emit(fmt, "list-presets", None, None, json!({}), rows)
        }
        Command::Build { address, out } => {
            let p = presets::from_address(address)?;
            let mut meta = Map::new();
            meta.insert("preset".into(), serde_json::to_value(&p.descriptor)?);
            match out {
                None => Ok(Outcome::Raw(serde_json::to_string_pretty(&io::to_json(&p.metrized, &meta))? + "\n")),
                Some(path) => {
                    io::save(path, &p.metrized, &meta)?;
                    emit(fmt, "build", Some(address), None, json!({}), json!({"path": path, "dim": p.dim()}))
                }
            }
        }
        Command::Info { src, identities } => {
            let s = resolve(src)?;
            emit(fmt, "info", Some(src), None, json!({"identities": identities}), info(&s, *identities))
        }
        Command::Sect { src, x, y } => {
            let s = resolve(src)?;
            let (dim, shape) = (s.metrized.dim(), s.herm_shape());
            let (xv, yv) = (parse_element(x, dim, shape)?, parse_element(y, dim, shape)?);
            let result = match &s.metrized {
                AnyMetrized::Rational(q) => {
                    let v = sectional::sect(q, &xv, &yv)?;
                    SectResult { value: Scalar::to_f64(&v), exact: Some(format_rational(&v)) }
                }
                AnyMetrized::Float(f) => SectResult { value: sectional::sect(f, &floats(&xv), &floats(&yv))?, exact: None },
            };
            emit(fmt, "sect", Some(src), None, json!({"x": x, "y": y}), result)
        }
        Command::ConstantSect { src } => {
            let s = resolve(src)?;
            let result = match &s.metrized {
                AnyMetrized::Rational(q) => {
                    ConstantResult { constant: sectional::constant_sect(q)?.map(|c| format_rational(&c)), exact: true }
                }
                AnyMetrized::Float(f) => {
                    ConstantResult { constant: sectional::constant_sect(f)?.map(|c| c.to_string()), exact: false }
                }
            };
            emit(fmt, "constant-sect", Some(src), None, json!({}), result)
        }
        Command::Extrema { src, starts, iters, seed } => {
            let s = resolve(src)?;
            let cfg = OptimizerConfig { starts: *starts, iterations: *iters, seed: seed.get(), ..Default::default() };
            let r = sectional::estimate_extrema(&s.metrized.to_f64(), &cfg)?;
            emit(fmt, "extrema", Some(src), Some(cfg.seed), serde_json::to_value(&cfg)?, r)
        }
        Command::Bw { src, samples, starts, seed } => {
            let s = resolve(src)?;
            let cfg = OptimizerConfig { starts: *starts, samples: *samples, seed: seed.get(), ..Default::default() };
            let m = s.metrized.to_f64();
            let r = sectional::bw_constant(m.algebra(), m.form(), &cfg)?;
            emit(fmt, "bw", Some(src), Some(cfg.seed), serde_json::to_value(&cfg)?, r)
        }
        Command::Idempotents(a) | Command::SquareZero(a) => {
            let idem = matches!(cli.command, Command::Idempotents(_));
            let s = resolve(&a.src)?;
            let cfg = SearchConfig { starts: a.starts, iterations: a.iters, seed: a.seed.get() };
            let r = match (idem, a.complex) {
                (true, false) => special::find_idempotents(&s.metrized, &cfg)?,
                (false, false) => special::find_square_zero(&s.metrized, &cfg)?,
                (true, true) => special::complexified_search(&s.metrized.to_f64(), SpecialKind::ComplexIdempotent, &cfg)?,
                (false, true) => special::complexified_search(&s.metrized.to_f64(), SpecialKind::ComplexSquareZero, &cfg)?,
            };
            let name = if idem { "idempotents" } else { "square-zero" };
            let config = json!({"starts": a.starts, "iterations": a.iters, "complex": a.complex});
            emit(fmt, name, Some(&a.src), Some(cfg.seed), config, r)
        }
        Command::Spectrum { src, e } => {
            let s = resolve(src)?;
            let ev = floats(&parse_element(e, s.metrized.dim(), s.herm_shape())?);
            let r = special::orthogonal_spectrum(&s.metrized.to_f64(), &ev)?;
            emit(fmt, "spectrum", Some(src), None, json!({"e": e}), r)
        }
        Command::Verify { suite: which } => run_suite(fmt, which),
    }
}

fn run_suite(fmt: Format, which: &Suite) -> Result<Outcome> {
    match which {
        Suite::Table1 { eps, starts, seed } => {
            let e = parse_rational(eps).ok_or_else(|| Error::InvalidParams(format!("bad epsilon: {eps}")))?;
            let cfg = SearchConfig { starts: *starts, seed: seed.get(), ..Default::default() };
            let cfg_json = json!({"eps": format_rational(&e), "starts": starts, "iterations": cfg.iterations});
            suite(fmt, "table1", Some(cfg.seed), cfg_json, verify::table1(&e, &cfg)?)
        }
        Suite::HermBounds { n, level, starts, samples, seed } => {
            let cfg = OptimizerConfig { starts: *starts, seed: seed.get(), ..Default::default() };
            let cfg_json = json!({"optimizer": cfg, "samples": samples});
            suite(fmt, "herm-bounds", Some(cfg.seed), cfg_json, verify::herm_bounds(*n, *level, &cfg, *samples)?)
        }
        Suite::BwMat { n, level, samples, seed } => {
            let cfg = OptimizerConfig { samples: *samples, seed: seed.get(), ..Default::default() };
            suite(fmt, "bw-mat", Some(cfg.seed), serde_json::to_value(&cfg)?, verify::bw_mat(*n, *level, &cfg)?)
        }
        Suite::SymmetricComposition { samples, seed } => {
            let sd = seed.get();
            suite(fmt, "symmetric-composition", Some(sd), json!({"samples": samples}), verify::symmetric_composition(*samples, sd)?)
        }
        Suite::Identities => suite(fmt, "identities", None, json!({}), verify::identities_battery()?),
        Suite::Bianchi { count, seed } => {
            let sd = seed.get();
            suite(fmt, "bianchi", Some(sd), json!({"count": count}), verify::bianchi(*count, sd)?)
        }
        Suite::Norton { samples, starts, seed } => {
            let cfg = SearchConfig { starts: *starts, seed: seed.get(), ..Default::default() };
            let cfg_json = json!({"samples": samples, "starts": starts, "iterations": cfg.iterations});
            suite(fmt, "norton", Some(cfg.seed), cfg_json, verify::norton(&cfg, *samples)?)
        }
        Suite::Cdk { samples, seed } => {
            let sd = seed.get();
            suite(fmt, "cdk", Some(sd), json!({"samples": samples}), verify::cdk(*samples, sd)?)
        }
    }
}

/// Parses `args` (program name first), runs the command and writes the report to `out`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(Outcome::Raw(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_PASS
        }
        Ok(Outcome::Report(text, passed)) => {
            let _ = out.write_all(text.as_bytes());
            if passed {
                EXIT_PASS
            } else {
                let _ = writeln!(err, "suite failed");
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("alg-lab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn result(stdout: &str) -> Value {
        serde_json::from_str::<Value>(stdout).unwrap()["result"].clone()
    }

    #[test]
    fn herm_literals() {
        let x = parse_element("diag(1,0,-1)", 6, Some((3, 0))).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(0, 1), rat(-1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        let y = parse_element("sym(1,3)", 6, Some((3, 0))).unwrap();
        assert_eq!(y[4], rat(1, 1));
        assert_eq!(y.iter().filter(|v| !v.is_zero()).count(), 1);
        let z = parse_element("2*sym(2,3) + diag(0,1/2,0)", 6, Some((3, 0))).unwrap();
        assert_eq!((z[1].clone(), z[5].clone()), (rat(1, 2), rat(2, 1)));
        assert!(parse_element("sym(1,4)", 6, Some((3, 0))).is_err());
        assert!(parse_element("diag(1,2)", 3, None).is_err());
        assert!(matches!(parse_element("1,2", 3, None), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hermitian_witness_plane() {
        let (code, out, _) = run_capture(&["sect", "herm:3:0", "--x", "diag(1,0,-1)", "--y", "sym(1,3)"]);
        assert_eq!(code, 0);
        let r = result(&out);
        assert_eq!(r["exact"], "3/2");
        assert_eq!(r["value"], 1.5);
    }

    #[test]
    fn constant_sect_of_c_epsilon_zero() {
        let (code, out, _) = run_capture(&["constant-sect", "preset:c_epsilon:0"]);
        assert_eq!(code, 0);
        assert_eq!(result(&out)["constant"], "1/4");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["constant-sect", "no_such_preset:1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["sect", "herm:3:0", "--x", "1,2", "--y", "sym(1,2)"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["verify", "table1", "--eps", "1/2"]).0, EXIT_USAGE);
    }

    #[test]
    fn csv_format() {
        let (code, out, _) = run_capture(&["--format", "csv", "constant-sect", "cross:3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("key,value\n"));
        assert!(out.contains("result.constant,1\n"));
    }

    #[test]
    fn verify_identities_passes() {
        let (code, out, _) = run_capture(&["verify", "identities"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(result(&out)["passed"], true);
    }
}
