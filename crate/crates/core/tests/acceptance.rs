//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::time::{Duration, Instant};

use alg_lab::algebra::{AnyMetrized, MetrizedAlgebra};
use alg_lab::io::{Format, Report};
use alg_lab::optimize::{gaussian, stream_rng, BracketObjective, OptimizerConfig, PlaneObjective, SectObjective};
use alg_lab::presets;
use alg_lab::scalar::{format_rational, parse_rational, rat, Rat};
use alg_lab::sectional;
use alg_lab::special::{self, SearchConfig};
use alg_lab::verify::{self, SuiteReport};
use serde_json::json;

const SEED: u64 = 0x5EC7;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_suites(reports: &[SuiteReport]) -> Outcome {
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(move |c| format!("{} {:?}: {} expected {} observed {}", r.suite, r.params, c.name, c.expected, c.observed)))
        .collect();
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() { format!("{checks} checks") } else { failures.join("; ") },
    }
}

fn constant_of(addr: &str) -> Option<Rat> {
    let p = presets::from_address(addr).expect("preset builds");
    sectional::constant_sect(p.rational().expect("rational preset")).expect("constant_sect runs")
}

fn exact_constant_sect() -> Outcome {
    let mut cases: Vec<(String, Rat)> = Vec::new();
    for eps in ["0", "3/10", "1", "2"] {
        let e = parse_rational(eps).unwrap();
        cases.push((format!("c_epsilon:{eps}"), rat(1, 4) - e.clone() * e));
    }
    for level in 0..=3 {
        cases.push((format!("hurwitz:{level}"), rat(0, 1)));
    }
    for addr in ["cross:3", "cross:7", "so3_killing"] {
        cases.push((addr.to_string(), rat(1, 1)));
    }
    cases.push(("r3_star+symmetrized".into(), rat(-1, 1)));
    cases.push(("r3_star+bracket".into(), rat(1, 1)));
    let mut bad = Vec::new();
    for (addr, want) in &cases {
        let got = constant_of(addr);
        if got.as_ref() != Some(want) {
            let shown = got.map(|c| format_rational(&c)).unwrap_or_else(|| "not constant".into());
            bad.push(format!("{addr} expected {} observed {shown}", format_rational(want)));
        }
    }
    Outcome { passed: bad.is_empty(), detail: if bad.is_empty() { format!("{} algebras", cases.len()) } else { bad.join("; ") } }
}

fn herm_bounds() -> Outcome {
    let cfg = OptimizerConfig { starts: 64, seed: SEED, ..Default::default() };
    let mut reports = Vec::new();
    let mut slow = Vec::new();
    let mut timings = Vec::new();
    for (n, level) in [(3, 0), (3, 1), (3, 2), (3, 3), (4, 0)] {
        let t = Instant::now();
        reports.push(verify::herm_bounds(n, level, &cfg, 100_000).expect("suite runs"));
        let dt = t.elapsed();
        timings.push(format!("({n},{level}) {:.1}s", dt.as_secs_f64()));
        if dt > Duration::from_secs(60) {
            slow.push(format!("herm:{n}:{level} took {dt:?} (limit 60 s)"));
        }
    }
    let mut o = from_suites(&reports);
    if !slow.is_empty() {
        o.passed = false;
        o.detail = format!("{}; {}", o.detail, slow.join("; "));
    }
    o.detail = format!("{}; {}", o.detail, timings.join(", "));
    o
}

fn commutator_constants() -> Outcome {
    let cfg = OptimizerConfig { seed: SEED, samples: 1_000_000, ..Default::default() };
    let mut o = from_suites(&[verify::bw_mat(2, 1, &cfg).expect("suite runs"), verify::bw_mat(1, 2, &cfg).expect("suite runs")]);
    let so4 = presets::so(4).expect("so(4) builds").float();
    let r = sectional::bw_constant(so4.algebra(), so4.form(), &cfg).expect("bw runs");
    let mut notes = vec![o.detail.clone()];
    if (r.sup_grassmann - 2.0).abs() > 1e-3 {
        o.passed = false;
        notes.push(format!("so(4) sup ratio expected 2 ± 1e-3 observed {}", r.sup_grassmann));
    }
    if r.gap > 1e-6 {
        o.passed = false;
        notes.push(format!("so(4) sup forms differ by {:e}", r.gap));
    }
    o.detail = notes.join("; ");
    o
}

/// Largest relative deviation between the analytic gradient and central differences.
fn gradient_deviation<O: PlaneObjective>(obj: &O, points: usize, seed: u64) -> f64 {
    const STEP: f64 = 1e-5;
    let n = obj.dim();
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let (x, y) = (gaussian(&mut rng, n), gaussian(&mut rng, n));
        let (_, gx, gy) = obj.value_grad(&x, &y);
        let mut fd = Vec::with_capacity(2 * n);
        for block in 0..2 {
            for i in 0..n {
                let (mut xp, mut yp, mut xm, mut ym) = (x.clone(), y.clone(), x.clone(), y.clone());
                if block == 0 {
                    xp[i] += STEP;
                    xm[i] -= STEP;
                } else {
                    yp[i] += STEP;
                    ym[i] -= STEP;
                }
                fd.push((obj.value(&xp, &yp) - obj.value(&xm, &ym)) / (2.0 * STEP));
            }
        }
        let analytic: Vec<f64> = gx.into_iter().chain(gy).collect();
        let scale = analytic.iter().chain(&fd).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-8);
        let diff = analytic.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(diff / scale);
    }
    worst
}

fn reports_at(threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool builds");
    pool.install(|| {
        let herm = presets::herm(3, 0).unwrap();
        let cfg = OptimizerConfig { starts: 16, samples: 50_000, seed: SEED, ..Default::default() };
        let ext = sectional::estimate_extrema(&herm.float(), &cfg).unwrap();
        let smp = sectional::sample_sect(&herm.float(), 50_000, SEED).unwrap();
        let mat = presets::matrix_lie(2, 1).unwrap().float();
        let bw = sectional::bw_constant(mat.algebra(), mat.form(), &cfg).unwrap();
        let c1 = presets::c_epsilon(&rat(1, 1)).unwrap();
        let sc = SearchConfig { starts: 64, seed: SEED, ..Default::default() };
        let ids = special::find_idempotents(&c1.metrized, &sc).unwrap();
        let table = verify::table1(&rat(1, 1), &sc).unwrap();
        let result = json!({"extrema": ext, "samples": smp, "bw": bw, "idempotents": ids, "table1": table});
        Report::new("determinism", None, Some(SEED), json!({}), result).render(Format::Json).unwrap()
    })
}

fn optimizer_health() -> Outcome {
    let herm: MetrizedAlgebra<f64> = presets::herm(3, 1).unwrap().float();
    let okubo = match presets::okubo_compact().unwrap().metrized {
        AnyMetrized::Float(m) => m,
        AnyMetrized::Rational(m) => m.to_f64(),
    };
    let su3 = presets::su(3).unwrap().float();
    let bracket = BracketObjective::new(su3.algebra(), su3.form()).unwrap();
    let deviations = [
        ("herm:3:1", gradient_deviation(&SectObjective::new(&herm), 100, 1)),
        ("okubo_compact", gradient_deviation(&SectObjective::new(&okubo), 100, 2)),
        ("su:3 bracket", gradient_deviation(&bracket, 100, 3)),
    ];
    let grad_ok = deviations.iter().all(|(_, d)| *d <= 1e-6);
    let base = reports_at(1);
    let same: Vec<bool> = [4, 8].iter().map(|&t| reports_at(t) == base).collect();
    let det_ok = same.iter().all(|&s| s);
    let mut detail: Vec<String> = deviations.iter().map(|(n, d)| format!("{n} gradient {d:.2e}")).collect();
    detail.push(format!("reports identical at 4/8 threads: {same:?} ({} bytes)", base.len()));
    Outcome { passed: grad_ok && det_ok, detail: detail.join(", ") }
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("exact constant sect", Box::new(exact_constant_sect)),
        ("Hermitian sect bounds", Box::new(herm_bounds)),
        ("commutator-norm constants", Box::new(commutator_constants)),
        ("idempotent table at eps = 1", Box::new(|| from_suites(&[verify::table1(&rat(1, 1), &SearchConfig { seed: SEED, ..Default::default() }).unwrap()]))),
        ("symmetric composition bounds", Box::new(|| from_suites(&[verify::symmetric_composition(100_000, SEED).unwrap()]))),
        ("identity battery", Box::new(|| from_suites(&[verify::identities_battery().unwrap()]))),
        ("property suites on 20 random algebras", Box::new(|| from_suites(&[verify::bianchi(20, SEED).unwrap()]))),
        ("idempotent and square-zero consequences", Box::new(|| from_suites(&[verify::norton(&SearchConfig { seed: SEED, ..Default::default() }, 10_000).unwrap()]))),
        ("optimizer health", Box::new(optimizer_health)),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failed += usize::from(!o.passed);
        println!("{} {}: {} [{:.1}s] {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, title, t.elapsed().as_secs_f64(), o.detail);
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
