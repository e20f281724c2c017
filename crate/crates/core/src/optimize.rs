//! Seeded multi-start gradient optimization of plane functions over Gr(2, n).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, MetrizedAlgebra};
use crate::linalg::{self, BilinearForm, LinearMap};

pub const DEFAULT_SEED: u64 = 0x5EC7;

/// `ALG_LAB_SEED` (decimal or `0x` hex) if set, else `0x5EC7`.
pub fn default_seed() -> u64 {
    std::env::var("ALG_LAB_SEED").ok().and_then(|s| parse_seed(&s)).unwrap_or(DEFAULT_SEED)
}

pub fn parse_seed(s: &str) -> Option<u64> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub iterations: usize,
    pub grad_tol: f64,
    pub seed: u64,
    /// Random pairs drawn alongside optimization (used by `bw_constant`).
    pub samples: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { starts: 64, iterations: 500, grad_tol: 1e-10, seed: default_seed(), samples: 1_000_000 }
    }
}

/// Independent stream for `(seed, index)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// A function of planes given as `K(x, y) / (h(x,x)h(y,y) − h(x,y)²)`.
pub trait PlaneObjective: Sync {
    fn dim(&self) -> usize;
    fn form(&self) -> &BilinearForm<f64>;
    fn form_inverse(&self) -> &LinearMap<f64>;
    /// `K(x, y)`
    fn numerator(&self, x: &[f64], y: &[f64]) -> f64;
    /// `(K, ∂K/∂x, ∂K/∂y)`
    fn numerator_grad(&self, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>);

    fn gram(&self, x: &[f64], y: &[f64]) -> f64 {
        let h = self.form();
        let hxy = h.eval(x, y);
        h.quad(x) * h.quad(y) - hxy * hxy
    }

    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        self.numerator(x, y) / self.gram(x, y)
    }

    /// Value and Euclidean gradient of `K/G`.
    fn value_grad(&self, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let h = self.form();
        let (k, kx, ky) = self.numerator_grad(x, y);
        let (hx, hy) = (h.lower(x), h.lower(y));
        let (hxx, hyy, hxy) = (linalg::dot(x, &hx), linalg::dot(y, &hy), linalg::dot(x, &hy));
        let g = hxx * hyy - hxy * hxy;
        let f = k / g;
        // ∂G/∂x = 2h(y,y)Hx − 2h(x,y)Hy
        let gx: Vec<f64> = (0..x.len()).map(|i| (kx[i] - f * (2.0 * hyy * hx[i] - 2.0 * hxy * hy[i])) / g).collect();
        let gy: Vec<f64> = (0..y.len()).map(|i| (ky[i] - f * (2.0 * hxx * hy[i] - 2.0 * hxy * hx[i])) / g).collect();
        (f, gx, gy)
    }
}

/// `sect = (h(x•x, y•y) − h(x•y, y•x)) / gram` for an invariant metric.
pub struct SectObjective<'a> {
    m: &'a MetrizedAlgebra<f64>,
}

impl<'a> SectObjective<'a> {
    pub fn new(m: &'a MetrizedAlgebra<f64>) -> Self {
        SectObjective { m }
    }
}

impl PlaneObjective for SectObjective<'_> {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn form(&self) -> &BilinearForm<f64> {
        self.m.form()
    }

    fn form_inverse(&self) -> &LinearMap<f64> {
        self.m.form_inverse()
    }

    fn numerator(&self, x: &[f64], y: &[f64]) -> f64 {
        let a = self.m.algebra();
        let h = self.m.form();
        h.eval(&a.mul(x, x), &a.mul(y, y)) - h.eval(&a.mul(x, y), &a.mul(y, x))
    }

    fn numerator_grad(&self, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let a = self.m.algebra();
        let h = self.m.form();
        let (xx, yy, xy, yx) = (a.mul(x, x), a.mul(y, y), a.mul(x, y), a.mul(y, x));
        let (hxx, hyy, hxy, hyx) = (h.lower(&xx), h.lower(&yy), h.lower(&xy), h.lower(&yx));
        let k = linalg::dot(&xx, &hyy) - linalg::dot(&xy, &hyx);
        // ∂x: (L(x)+R(x))ᵀH(yy) − R(y)ᵀH(yx) − L(y)ᵀH(xy)
        let mut gx = linalg::add(&a.left_op_t_apply(x, &hyy), &a.right_op_t_apply(x, &hyy));
        gx = linalg::sub(&gx, &a.right_op_t_apply(y, &hyx));
        gx = linalg::sub(&gx, &a.left_op_t_apply(y, &hxy));
        // ∂y: (L(y)+R(y))ᵀH(xx) − L(x)ᵀH(yx) − R(x)ᵀH(xy)
        let mut gy = linalg::add(&a.left_op_t_apply(y, &hxx), &a.right_op_t_apply(y, &hxx));
        gy = linalg::sub(&gy, &a.left_op_t_apply(x, &hyx));
        gy = linalg::sub(&gy, &a.right_op_t_apply(x, &hxy));
        (k, gx, gy)
    }
}

/// `|[x,y]|²_f / gram_f` for a bracket algebra and a positive definite form `f`.
pub struct BracketObjective<'a> {
    a: &'a Algebra<f64>,
    f: &'a BilinearForm<f64>,
    f_inv: LinearMap<f64>,
}

impl<'a> BracketObjective<'a> {
    pub fn new(a: &'a Algebra<f64>, f: &'a BilinearForm<f64>) -> crate::error::Result<Self> {
        let f_inv = linalg::inverse(&f.as_map())?;
        Ok(BracketObjective { a, f, f_inv })
    }

    pub fn bracket_norm2(&self, x: &[f64], y: &[f64]) -> f64 {
        self.f.quad(&self.a.mul(x, y))
    }
}

impl PlaneObjective for BracketObjective<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn form(&self) -> &BilinearForm<f64> {
        self.f
    }

    fn form_inverse(&self) -> &LinearMap<f64> {
        &self.f_inv
    }

    fn numerator(&self, x: &[f64], y: &[f64]) -> f64 {
        self.bracket_norm2(x, y)
    }

    fn numerator_grad(&self, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let b = self.a.mul(x, y);
        let fb = self.f.lower(&b);
        let k = linalg::dot(&b, &fb);
        let gx = linalg::scale(&2.0, &self.a.right_op_t_apply(y, &fb));
        let gy = linalg::scale(&2.0, &self.a.left_op_t_apply(x, &fb));
        (k, gx, gy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StartResult {
    pub start: usize,
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// h-orthonormalizes `(x, y)`; `None` when `y` is (numerically) in the span of `x`.
pub fn orthonormalize(h: &BilinearForm<f64>, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let nx = h.quad(x).sqrt();
    if !(nx > 0.0 && nx.is_finite()) {
        return None;
    }
    let x = linalg::scale(&(1.0 / nx), x);
    let p = h.eval(&x, y);
    let y = linalg::sub(y, &linalg::scale(&p, &x));
    let ny = h.quad(&y).sqrt();
    if !(ny > 1e-10 && ny.is_finite()) {
        return None;
    }
    Some((x, linalg::scale(&(1.0 / ny), &y)))
}

fn random_frame<O: PlaneObjective>(obj: &O, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = obj.dim();
    loop {
        let x = gaussian(rng, n);
        let y = gaussian(rng, n);
        if let Some(f) = orthonormalize(obj.form(), &x, &y) {
            return f;
        }
    }
}

/// Riemannian gradient ascent (or descent) with Armijo backtracking from one seeded start.
pub fn run_start<O: PlaneObjective>(obj: &O, goal: Goal, cfg: &OptimizerConfig, start: usize, stream_offset: u64) -> StartResult {
    let mut rng = stream_rng(cfg.seed, stream_offset + start as u64);
    let (mut x, mut y) = random_frame(obj, &mut rng);
    let sign = match goal {
        Goal::Maximize => 1.0,
        Goal::Minimize => -1.0,
    };
    let hinv = obj.form_inverse();
    let h = obj.form();
    let hdot = |a: &[f64], b: &[f64]| {
        let n = a.len() / 2;
        h.eval(&a[..n], &b[..n]) + h.eval(&a[n..], &b[n..])
    };
    let mut step = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let (mut f, mut gx, mut gy) = obj.value_grad(&x, &y);
    for _ in 0..cfg.iterations {
        iterations += 1;
        let dx = hinv.apply(&gx);
        let dy = hinv.apply(&gy);
        let gnorm2 = linalg::dot(&gx, &dx) + linalg::dot(&gy, &dy);
        if gnorm2.sqrt() < cfg.grad_tol {
            converged = true;
            break;
        }
        let pos: Vec<f64> = x.iter().chain(&y).copied().collect();
        let dir: Vec<f64> = dx.iter().chain(&dy).copied().collect();
        // Barzilai–Borwein trial step in the h-metric, safeguarded by backtracking
        step = match &prev {
            Some((p0, d0)) => {
                let s = linalg::sub(&pos, p0);
                let z = linalg::sub(&dir, d0);
                let sz = hdot(&s, &z).abs();
                if sz > 0.0 {
                    (hdot(&s, &s) / sz).clamp(1e-12, 1e8)
                } else {
                    (step * 2.0).min(1e8)
                }
            }
            None => 1.0,
        };
        let mut accepted = None;
        while step > 1e-16 {
            let xn = linalg::add(&x, &linalg::scale(&(sign * step), &dx));
            let yn = linalg::add(&y, &linalg::scale(&(sign * step), &dy));
            let frame = match orthonormalize(h, &xn, &yn) {
                Some(fr) => fr,
                None => {
                    // degenerate frame: re-randomize the second vector
                    let y2 = gaussian(&mut rng, x.len());
                    match orthonormalize(h, &xn, &y2) {
                        Some(fr) => fr,
                        None => {
                            step *= 0.5;
                            continue;
                        }
                    }
                }
            };
            let fnew = obj.value(&frame.0, &frame.1);
            if sign * (fnew - f) >= 1e-4 * step * gnorm2 {
                accepted = Some(frame);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((xn, yn)) => {
                prev = Some((pos, dir));
                x = xn;
                y = yn;
                (f, gx, gy) = obj.value_grad(&x, &y);
            }
            None => {
                // no ascent possible at machine precision
                converged = true;
                break;
            }
        }
    }
    StartResult { start, value: obj.value(&x, &y), x, y, iterations, converged }
}

/// Runs all starts in parallel and reduces in start order; ties keep the smaller index.
pub fn multi_start<O: PlaneObjective>(obj: &O, goal: Goal, cfg: &OptimizerConfig, stream_offset: u64) -> (StartResult, Vec<StartResult>) {
    let runs: Vec<StartResult> = (0..cfg.starts.max(1))
        .into_par_iter()
        .map(|s| run_start(obj, goal, cfg, s, stream_offset))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        let better = match goal {
            Goal::Maximize => r.value > runs[best].value,
            Goal::Minimize => r.value < runs[best].value,
        };
        if better {
            best = i;
        }
    }
    (runs[best].clone(), runs)
}

/// Max of `K/G` and of `K/(h(x,x)h(y,y))` over random Gaussian pairs, reduced in chunk order.
pub fn sample_sup<O: PlaneObjective>(obj: &O, samples: usize, seed: u64, stream_offset: u64) -> (f64, f64, Option<(Vec<f64>, Vec<f64>)>) {
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, Option<(Vec<f64>, Vec<f64>)>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, stream_offset + c as u64);
            let n = obj.dim();
            let h = obj.form();
            let count = CHUNK.min(samples - c * CHUNK);
            let (mut best_g, mut best_n) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            let mut wit = None;
            for _ in 0..count {
                let x = gaussian(&mut rng, n);
                let y = gaussian(&mut rng, n);
                let k = obj.numerator(&x, &y);
                let (hxx, hyy, hxy) = (h.quad(&x), h.quad(&y), h.eval(&x, &y));
                let g = hxx * hyy - hxy * hxy;
                if g <= 1e-12 * hxx * hyy {
                    continue;
                }
                let rg = k / g;
                let rn = k / (hxx * hyy);
                if rg > best_g {
                    best_g = rg;
                    wit = Some((x.clone(), y.clone()));
                }
                best_n = best_n.max(rn);
            }
            (best_g, best_n, wit)
        })
        .collect();
    let mut out = (f64::NEG_INFINITY, f64::NEG_INFINITY, None);
    for (g, nn, w) in parts {
        if g > out.0 {
            out.0 = g;
            out.2 = w;
        }
        out.1 = out.1.max(nn);
    }
    out
}
