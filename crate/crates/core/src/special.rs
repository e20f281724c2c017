//! Idempotents, square-zero elements, orthogonal spectra and structural checks.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num::{BigInt, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, AnyMetrized, MetrizedAlgebra};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, LinearMap};
use crate::optimize::{gaussian, stream_rng};
use crate::scalar::{format_rational, snap_rational, Rat, Scalar};
use crate::sectional;

const IDEMPOTENT_STREAM: u64 = 1 << 48;
const SQUARE_ZERO_STREAM: u64 = 1 << 49;
const COMPLEX_STREAM: u64 = 1 << 50;

const ACCEPT: f64 = 1e-9;
const DEDUP: f64 = 1e-6;
const SNAP_DEN: i64 = 10_000;
const SNAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { starts: 256, iterations: 200, seed: crate::optimize::default_seed() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    Idempotent,
    SquareZero,
    ComplexIdempotent,
    ComplexSquareZero,
}

/// Coordinates recovered exactly, each of the form `q·√s` with `s` squarefree.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExactElement {
    pub coords: Vec<String>,
    /// `h(x, x)` computed exactly from the recovered coordinates.
    pub norm: String,
    /// Whether the defining equation was re-verified in exact arithmetic.
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpecialElement {
    pub coords: Vec<f64>,
    /// Imaginary part for complexified kinds.
    pub imag: Option<Vec<f64>>,
    pub residual: f64,
    pub norm: f64,
    /// Eigenvalues of `L(x)` as `(re, im)`, sorted.
    pub spectrum: Vec<(f64, f64)>,
    pub orthogonal_spectrum: Option<Vec<f64>>,
    pub exact: Option<ExactElement>,
    /// `sect(a, b)` and the closed-form prediction, for complexified kinds with independent parts.
    pub sect_check: Option<(f64, f64)>,
    /// Newton residuals of the last three iterates.
    pub tail: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpecialElementSet {
    pub kind: SpecialKind,
    pub elements: Vec<SpecialElement>,
    pub starts: usize,
    pub seed: u64,
}

impl SpecialElementSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn dmat(m: &LinearMap<f64>) -> DMatrix<f64> {
    m.to_dmatrix()
}

fn euclid(a: &[f64]) -> f64 {
    linalg::norm2(a)
}

/// Distance used for deduplication: the h-norm for Euclidean metrics, max-abs otherwise.
fn distance(m: &MetrizedAlgebra<f64>, a: &[f64], b: &[f64]) -> f64 {
    let d = linalg::sub(a, b);
    if m.is_euclidean() {
        m.form().quad(&d).max(0.0).sqrt()
    } else {
        linalg::max_abs(&d)
    }
}

/// Eigenvalues as sorted `(re, im)` pairs. Symmetric input goes to the symmetric solver;
/// otherwise a Schur decomposition with an iteration cap is used.
fn eigenvalues(a: DMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    let scale = a.amax().max(1e-300);
    let mut ev: Vec<(f64, f64)> = if (&a - a.transpose()).amax() <= 1e-12 * scale {
        let sym = (&a + a.transpose()) * 0.5;
        sym.symmetric_eigenvalues().iter().map(|v| (*v, 0.0)).collect()
    } else {
        let schur = a.try_schur(f64::EPSILON, 100_000).ok_or(Error::NoConvergence)?;
        schur.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect()
    };
    for v in ev.iter_mut() {
        *v = (clean(v.0), clean(v.1));
    }
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(ev)
}

/// Spectrum of `L(x)`, computed in an h-orthonormal frame when h is positive definite
/// so that h-self-adjoint operators are handled as symmetric matrices.
fn spectrum(m: &MetrizedAlgebra<f64>, x: &[f64]) -> Result<Vec<(f64, f64)>> {
    let l = dmat(&m.algebra().left_op(x));
    if m.is_euclidean() {
        if let Some(ch) = dmat(&m.form().as_map()).cholesky() {
            let c = ch.l();
            let ct_inv = c.transpose().try_inverse().ok_or(Error::Degenerate)?;
            return eigenvalues(c.transpose() * l * ct_inv);
        }
    }
    eigenvalues(l)
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

/// Minimum-norm solution of `j δ = rhs`, singular values below `1e-10·σ_max` dropped.
/// Equals the Newton step when `j` is well conditioned; on solution manifolds, where the
/// Jacobian is singular at the roots, it gives the normal Gauss–Newton step.
fn newton_step(j: DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let svd = j.svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let d = svd.solve(&DVector::from_column_slice(rhs), cutoff).ok()?;
    d.iter().all(|v| v.is_finite()).then(|| d.iter().copied().collect())
}

fn unit_start(m: &MetrizedAlgebra<f64>, rng: &mut impl Rng) -> Vec<f64> {
    let n = m.dim();
    loop {
        let g = gaussian(rng, n);
        let q = if m.is_euclidean() { m.form().quad(&g) } else { linalg::dot(&g, &g) };
        if q > 1e-12 {
            return linalg::scale(&(1.0 / q.sqrt()), &g);
        }
    }
}

struct Root {
    x: Vec<f64>,
    residual: f64,
    tail: Vec<f64>,
}

fn idempotent_newton(a: &Algebra<f64>, mut x: Vec<f64>, iterations: usize) -> Option<Root> {
    let n = x.len();
    let mut history = Vec::new();
    for _ in 0..iterations {
        let f = linalg::sub(&a.mul(&x, &x), &x);
        let res = euclid(&f);
        history.push(res);
        if res <= 1e-14 * euclid(&x).max(1.0) {
            break;
        }
        // J = L(x) + R(x) − Id
        let mut j = dmat(&a.left_op(&x).add(&a.right_op(&x)));
        for i in 0..n {
            j[(i, i)] -= 1.0;
        }
        let d = newton_step(j, &linalg::scale(&-1.0, &f))?;
        x = linalg::add(&x, &d);
        if !x.iter().all(|v| v.is_finite()) || euclid(&x) > 1e8 {
            return None;
        }
    }
    let residual = euclid(&linalg::sub(&a.mul(&x, &x), &x));
    let tail = history.iter().rev().take(3).rev().copied().collect();
    (residual <= ACCEPT && euclid(&x) > DEDUP).then_some(Root { x, residual, tail })
}

fn sort_and_dedup(m: &MetrizedAlgebra<f64>, mut roots: Vec<Root>, key: impl Fn(&Root) -> Vec<f64>) -> Vec<Root> {
    roots.sort_by(|p, q| {
        let (a, b) = (key(p), key(q));
        a.iter().zip(&b).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<Root> = Vec::new();
    for r in roots {
        let k = key(&r);
        if kept.iter().all(|s| distance(m, &key(s), &k) > DEDUP) {
            kept.push(r);
        }
    }
    kept
}

/// Newton search for nonzero idempotents `x•x = x` from seeded starts on the unit sphere.
pub fn find_idempotents(am: &AnyMetrized, cfg: &SearchConfig) -> Result<SpecialElementSet> {
    let m = am.to_f64();
    let roots: Vec<Root> = (0..cfg.starts)
        .into_par_iter()
        .filter_map(|s| {
            let mut rng = stream_rng(cfg.seed, IDEMPOTENT_STREAM + s as u64);
            idempotent_newton(m.algebra(), unit_start(&m, &mut rng), cfg.iterations)
        })
        .collect();
    let roots = sort_and_dedup(&m, roots, |r| r.x.clone());
    let elements = roots.into_iter().map(|r| describe(am, &m, r, Equation::Idempotent)).collect();
    Ok(SpecialElementSet { kind: SpecialKind::Idempotent, elements, starts: cfg.starts, seed: cfg.seed })
}

/// Brute-force idempotent count for dimension at most 3: Newton polish from a
/// spherical grid at several radii.
pub fn count_idempotents_exhaustive(am: &AnyMetrized) -> Result<Option<usize>> {
    let m = am.to_f64();
    let n = m.dim();
    if n > 3 {
        return Ok(None);
    }
    let mut starts = Vec::new();
    let radii = [0.1, 0.3, 0.6, 1.0, 1.7, 3.0, 6.0];
    let (nt, np) = (24usize, 48usize);
    for &r in &radii {
        match n {
            1 => {
                starts.push(vec![r]);
                starts.push(vec![-r]);
            }
            2 => {
                for k in 0..np {
                    let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / np as f64;
                    starts.push(vec![r * t.cos(), r * t.sin()]);
                }
            }
            _ => {
                for i in 0..nt {
                    let th = std::f64::consts::PI * (i as f64 + 0.5) / nt as f64;
                    for k in 0..np {
                        let ph = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / np as f64;
                        starts.push(vec![r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]);
                    }
                }
            }
        }
    }
    let roots: Vec<Root> = starts.into_par_iter().filter_map(|s| idempotent_newton(m.algebra(), s, 200)).collect();
    Ok(Some(sort_and_dedup(&m, roots, |r| r.x.clone()).len()))
}

/// Normalizes a ray so that its first significant coordinate is positive.
fn ray_sign(x: &[f64]) -> Vec<f64> {
    let scale = linalg::max_abs(x);
    match x.iter().find(|v| v.abs() > 1e-6 * scale) {
        Some(v) if *v < 0.0 => linalg::scale(&-1.0, x),
        _ => x.to_vec(),
    }
}

fn normalize(m: &MetrizedAlgebra<f64>, x: &[f64]) -> Option<Vec<f64>> {
    let q = if m.is_euclidean() { m.form().quad(x) } else { linalg::dot(x, x) };
    (q > 1e-24).then(|| linalg::scale(&(1.0 / q.sqrt()), x))
}

fn square_zero_descent(m: &MetrizedAlgebra<f64>, mut x: Vec<f64>, iterations: usize) -> Option<Root> {
    let a = m.algebra();
    let g = |x: &[f64]| {
        let s = a.mul(x, x);
        linalg::dot(&s, &s)
    };
    // projected gradient on the sphere
    let mut step = 1.0;
    for _ in 0..iterations.min(100) {
        let s = a.mul(&x, &x);
        let f = linalg::dot(&s, &s);
        if f.sqrt() < 1e-4 {
            break;
        }
        let j = a.left_op(&x).add(&a.right_op(&x));
        let grad = linalg::scale(&2.0, &j.transpose().apply(&s));
        let mut moved = false;
        while step > 1e-12 {
            let cand = normalize(m, &linalg::sub(&x, &linalg::scale(&step, &grad)))?;
            if g(&cand) < f {
                x = cand;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    // Gauss–Newton polish with minimum-norm steps
    let mut history = Vec::new();
    for _ in 0..iterations {
        let s = a.mul(&x, &x);
        let res = euclid(&s);
        history.push(res);
        if res <= 1e-15 {
            break;
        }
        let j = dmat(&a.left_op(&x).add(&a.right_op(&x))) * tangent_projector(&x);
        let pinv = j.pseudo_inverse(1e-10).ok()?;
        let d: Vec<f64> = (pinv * DVector::from_column_slice(&s)).iter().map(|v| -v).collect();
        x = normalize(m, &linalg::add(&x, &d))?;
        if history.len() > 3 && res > 0.5 * history[history.len() - 2] && res > 1e-6 {
            break;
        }
    }
    let residual = euclid(&a.mul(&x, &x));
    let tail = history.iter().rev().take(3).rev().copied().collect();
    (residual <= ACCEPT).then(|| Root { x: ray_sign(&x), residual, tail })
}

/// `I − z zᵀ/|z|²`
fn tangent_projector(z: &[f64]) -> DMatrix<f64> {
    let v = DVector::from_column_slice(z);
    let q = v.norm_squared();
    DMatrix::identity(z.len(), z.len()) - &v * v.transpose() / q
}

/// Square-zero rays `x•x = 0`, found by minimizing `‖x•x‖²` on the unit sphere
/// followed by Gauss–Newton. Rays are identified up to sign.
pub fn find_square_zero(am: &AnyMetrized, cfg: &SearchConfig) -> Result<SpecialElementSet> {
    let m = am.to_f64();
    let roots: Vec<Root> = (0..cfg.starts)
        .into_par_iter()
        .filter_map(|s| {
            let mut rng = stream_rng(cfg.seed, SQUARE_ZERO_STREAM + s as u64);
            square_zero_descent(&m, unit_start(&m, &mut rng), cfg.iterations)
        })
        .collect();
    let roots = sort_and_dedup(&m, roots, |r| r.x.clone());
    let elements = roots.into_iter().map(|r| describe(am, &m, r, Equation::SquareZero)).collect();
    Ok(SpecialElementSet { kind: SpecialKind::SquareZero, elements, starts: cfg.starts, seed: cfg.seed })
}

#[derive(Clone, Copy)]
enum Equation {
    Idempotent,
    SquareZero,
}

fn describe(am: &AnyMetrized, m: &MetrizedAlgebra<f64>, r: Root, eq: Equation) -> SpecialElement {
    let norm = m.form().quad(&r.x);
    let orthogonal = match eq {
        Equation::Idempotent => orthogonal_spectrum(m, &r.x).ok().map(|s| s.values),
        Equation::SquareZero => None,
    };
    let target = match eq {
        Equation::Idempotent => r.x.clone(),
        // scale so the leading coordinate is 1 before reconstruction
        Equation::SquareZero => {
            let lead = r.x.iter().copied().find(|v| v.abs() > 1e-6).unwrap_or(1.0);
            linalg::scale(&(1.0 / lead), &r.x)
        }
    };
    let exact = am.as_rational().and_then(|q| recover_exact(q, &target, eq));
    SpecialElement {
        spectrum: spectrum(m, &r.x).unwrap_or_default(),
        coords: r.x,
        imag: None,
        residual: r.residual,
        norm,
        orthogonal_spectrum: orthogonal,
        exact,
        sect_check: None,
        tail: r.tail,
    }
}

/// Sums `Σ c_s √s` over squarefree `s`; zero iff every coefficient vanishes.
#[derive(Debug, Clone, Default, PartialEq)]
struct SurdSum(BTreeMap<u64, Rat>);

impl SurdSum {
    fn term(c: Rat, s: u64) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(s, c);
        }
        SurdSum(m)
    }

    fn add_term(&mut self, c: Rat, s: u64) {
        let e = self.0.entry(s).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&s);
        }
    }

    fn add(&mut self, other: &SurdSum) {
        for (s, c) in &other.0 {
            self.add_term(c.clone(), *s);
        }
    }

    fn mul(&self, other: &SurdSum) -> SurdSum {
        let mut out = SurdSum::default();
        for (s, c) in &self.0 {
            for (t, d) in &other.0 {
                let g = num::integer::gcd(*s, *t);
                out.add_term(c.clone() * d.clone() * Rat::from_integer(BigInt::from(g)), s / g * (t / g));
            }
        }
        out
    }

    fn scale(&self, k: &Rat) -> SurdSum {
        let mut out = SurdSum::default();
        for (s, c) in &self.0 {
            out.add_term(c.clone() * k.clone(), *s);
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn render(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(s, c)| if *s == 1 { format_rational(c) } else { format!("{}*sqrt({s})", format_rational(c)) })
            .collect();
        parts.join(" + ")
    }
}

/// `n = m²·s` with `s` squarefree.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    let (mut m, mut s) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            m *= p;
        }
        if n % p == 0 {
            n /= p;
            s *= p;
        }
        p += 1;
    }
    (m, s * n)
}

/// Recovers `x` as `q` or `±q√s` from a float, with `q` of bounded denominator.
fn recover_coordinate(x: f64) -> Option<SurdSum> {
    if x.abs() <= SNAP_TOL {
        return Some(SurdSum::default());
    }
    if let Some(r) = snap_rational(x, SNAP_DEN, SNAP_TOL) {
        return Some(SurdSum::term(r, 1));
    }
    let sq = snap_rational(x * x, SNAP_DEN, SNAP_TOL * x.abs().max(1.0) * 4.0)?;
    // √(p/q) = √(pq)/q
    let p = sq.numer().to_u64()?;
    let q = sq.denom().to_u64()?;
    let (mm, s) = squarefree_split(p.checked_mul(q)?);
    let mut c = Rat::new(BigInt::from(mm), BigInt::from(q));
    if x < 0.0 {
        c = -c;
    }
    let value = Scalar::to_f64(&c) * (s as f64).sqrt();
    ((value - x).abs() <= 1e-9 * x.abs().max(1.0)).then(|| SurdSum::term(c, s))
}

fn recover_exact(q: &MetrizedAlgebra<Rat>, x: &[f64], eq: Equation) -> Option<ExactElement> {
    let coords: Vec<SurdSum> = x.iter().map(|v| recover_coordinate(*v)).collect::<Option<_>>()?;
    let n = coords.len();
    let a = q.algebra();
    // x•x in the multiquadratic field
    let mut sq = vec![SurdSum::default(); n];
    for i in 0..n {
        if coords[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if coords[j].is_zero() {
                continue;
            }
            let p = coords[i].mul(&coords[j]);
            for (k, c) in a.basis_product(i, j) {
                sq[*k].add(&p.scale(c));
            }
        }
    }
    let verified = (0..n).all(|k| {
        let mut d = sq[k].clone();
        if let Equation::Idempotent = eq {
            d.add(&coords[k].scale(&-Rat::from_integer(1.into())));
        }
        d.is_zero()
    });
    let h = q.form();
    let mut norm = SurdSum::default();
    for i in 0..n {
        for j in 0..n {
            if !h.get(i, j).is_zero() {
                norm.add(&coords[i].mul(&coords[j]).scale(h.get(i, j)));
            }
        }
    }
    Some(ExactElement { coords: coords.iter().map(SurdSum::render).collect(), norm: norm.render(), verified })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OrthogonalSpectrum {
    /// Eigenvalues of `L(e)` on `e^⊥`, ascending.
    pub values: Vec<f64>,
    /// Exact values where each eigenvalue snaps to a rational.
    pub exact: Option<Vec<String>>,
    /// `‖e•e − e‖`; the restriction is meaningful only when this is small.
    pub idempotent_residual: f64,
}

/// Eigenvalues of `L(e)` restricted to the h-orthogonal complement of `e`.
pub fn orthogonal_spectrum(m: &MetrizedAlgebra<f64>, e: &[f64]) -> Result<OrthogonalSpectrum> {
    check_dim(m.dim(), e.len())?;
    let n = m.dim();
    let a = m.algebra();
    let h = m.form();
    let hee = h.quad(e);
    if hee.abs() <= 1e-12 * linalg::dot(e, e).max(1e-300) {
        return Err(Error::Isotropic);
    }
    let residual = euclid(&linalg::sub(&a.mul(e, e), e));
    let l = dmat(&a.left_op(e));
    let restricted = if m.is_euclidean() {
        // h-orthonormal basis of e^⊥ by Gram–Schmidt; the restriction is symmetric
        // whenever L(e) is h-self-adjoint
        let mut frame: Vec<Vec<f64>> = vec![linalg::scale(&(1.0 / hee.sqrt()), e)];
        for i in 0..n {
            let mut v = linalg::basis::<f64>(n, i);
            for _ in 0..2 {
                for b in &frame {
                    let c = h.eval(b, &v);
                    v = linalg::sub(&v, &linalg::scale(&c, b));
                }
            }
            let q = h.quad(&v);
            if q > 1e-10 {
                frame.push(linalg::scale(&(1.0 / q.sqrt()), &v));
            }
        }
        let basis = &frame[1..];
        let hm = dmat(&h.as_map());
        let k = basis.len();
        let bm = DMatrix::from_fn(n, k, |r, c| basis[c][r]);
        bm.transpose() * hm * l * bm
    } else {
        // basis P e_i (i ≠ p) of e^⊥, P the h-orthogonal projection; needs e_p ≠ 0
        let p = (0..n).max_by(|&i, &j| e[i].abs().total_cmp(&e[j].abs())).unwrap_or(0);
        let he = h.lower(e);
        let cols: Vec<Vec<f64>> = (0..n)
            .filter(|&i| i != p)
            .map(|i| {
                let mut v = linalg::scale(&(-he[i] / hee), e);
                v[i] += 1.0;
                v
            })
            .collect();
        let b = DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r]);
        let lb = &l * &b;
        b.svd(true, true).solve(&lb, 1e-14).map_err(|_| Error::Degenerate)?
    };
    if restricted.is_empty() {
        return Ok(OrthogonalSpectrum { values: vec![], exact: Some(vec![]), idempotent_residual: residual });
    }
    let ev = eigenvalues(restricted.clone())?;
    let scale = restricted.amax().max(1.0);
    if ev.iter().any(|c| c.1.abs() > 1e-9 * scale) {
        return Err(Error::NonRealSpectrum);
    }
    let mut values: Vec<f64> = ev.iter().map(|c| c.0).collect();
    values.sort_by(f64::total_cmp);
    let exact = values.iter().map(|v| snap_rational(*v, SNAP_DEN, 1e-9).map(|r| format_rational(&r))).collect();
    Ok(OrthogonalSpectrum { values, exact, idempotent_residual: residual })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StructReport {
    /// `tr L(x) = 0` for all `x`.
    pub exact: bool,
    /// `x ↦ L(x)` is injective.
    pub faithful: bool,
    /// Positive semidefiniteness of `L(x)` for each supplied element.
    pub psd: Vec<bool>,
}

/// Exactness and faithfulness, computed exactly in rational mode; PSD tests for `elements`.
pub fn structural_report(am: &AnyMetrized, elements: &[Vec<f64>]) -> Result<StructReport> {
    let (exact, faithful) = match am {
        AnyMetrized::Rational(q) => structure_flags(q.algebra()),
        AnyMetrized::Float(f) => structure_flags(f.algebra()),
    };
    let m = am.to_f64();
    let psd = elements.iter().map(|x| is_psd(&m, x)).collect::<Result<_>>()?;
    Ok(StructReport { exact, faithful, psd })
}

fn structure_flags<T: Scalar>(a: &Algebra<T>) -> (bool, bool) {
    let n = a.dim();
    let ops: Vec<LinearMap<T>> = (0..n).map(|i| a.left_op(&linalg::basis(n, i))).collect();
    let exact = ops.iter().all(|l| l.trace().negligible());
    let rows: Vec<Vec<T>> = ops.iter().map(|l| l.entries().to_vec()).collect();
    (exact, linalg::rank(&rows) == n)
}

/// Whether `L(x)` is positive semidefinite for the metric, i.e. `h(L(x)v, v) ≥ 0`.
pub fn is_psd(m: &MetrizedAlgebra<f64>, x: &[f64]) -> Result<bool> {
    check_dim(m.dim(), x.len())?;
    if !m.is_euclidean() {
        return Err(Error::NotEuclidean);
    }
    let hl = dmat(&m.form().as_map()) * dmat(&m.algebra().left_op(x));
    let sym = (&hl + hl.transpose()) * 0.5;
    let scale = sym.amax().max(1.0);
    Ok(sym.symmetric_eigenvalues().iter().all(|v| *v >= -1e-9 * scale))
}

struct ComplexRoot {
    a: Vec<f64>,
    b: Vec<f64>,
    residual: f64,
    tail: Vec<f64>,
}

fn complex_residual(alg: &Algebra<f64>, a: &[f64], b: &[f64], kind: SpecialKind) -> Vec<f64> {
    let re = linalg::sub(&alg.mul(a, a), &alg.mul(b, b));
    let im = linalg::add(&alg.mul(a, b), &alg.mul(b, a));
    match kind {
        SpecialKind::ComplexIdempotent => [linalg::sub(&re, a), linalg::sub(&im, b)].concat(),
        _ => [re, im].concat(),
    }
}

fn complex_gauss_newton(m: &MetrizedAlgebra<f64>, mut z: Vec<f64>, kind: SpecialKind, iterations: usize) -> Option<ComplexRoot> {
    let alg = m.algebra();
    let n = m.dim();
    let homogeneous = kind == SpecialKind::ComplexSquareZero;
    let mut history = Vec::new();
    for _ in 0..iterations {
        let (a, b) = z.split_at(n);
        let f = complex_residual(alg, a, b, kind);
        let res = euclid(&f);
        history.push(res);
        if res <= 1e-15 {
            break;
        }
        // Jacobian of (a a − b b, a b + b a) with respect to (a, b)
        let (la, ra, lb, rb) = (dmat(&alg.left_op(a)), dmat(&alg.right_op(a)), dmat(&alg.left_op(b)), dmat(&alg.right_op(b)));
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        j.view_mut((0, 0), (n, n)).copy_from(&(&la + &ra));
        j.view_mut((0, n), (n, n)).copy_from(&(-(&lb + &rb)));
        j.view_mut((n, 0), (n, n)).copy_from(&(&lb + &rb));
        j.view_mut((n, n), (n, n)).copy_from(&(&la + &ra));
        if !homogeneous {
            for i in 0..2 * n {
                j[(i, i)] -= 1.0;
            }
        }
        if homogeneous {
            // J z = 2F: restrict to the tangent space, the radial step is undone by normalization
            j = j * tangent_projector(&z);
        }
        let pinv = j.pseudo_inverse(1e-10).ok()?;
        let d = pinv * DVector::from_column_slice(&f);
        z = z.iter().zip(d.iter()).map(|(u, v)| u - v).collect();
        if homogeneous {
            let s = euclid(&z);
            if s < 1e-12 {
                return None;
            }
            z = linalg::scale(&(1.0 / s), &z);
        }
        if !z.iter().all(|v| v.is_finite()) || euclid(&z) > 1e8 {
            return None;
        }
    }
    let (a, b) = z.split_at(n);
    let residual = euclid(&complex_residual(alg, a, b, kind));
    let tail = history.iter().rev().take(3).rev().copied().collect();
    (residual <= ACCEPT && euclid(&z) > DEDUP).then(|| ComplexRoot { a: a.to_vec(), b: b.to_vec(), residual, tail })
}

/// Searches `𝔄 ⊗ ℂ` for `a + ib` with `(a+ib)² = 0` or `= a+ib`. For solutions with
/// independent `a, b` on a commutative Euclidean algebra, `sect(a, b)` is compared
/// with `|a•a|²/gram` (square-zero) or `(|b•b|² + ¼|b|²)/gram` (idempotent).
pub fn complexified_search(m: &MetrizedAlgebra<f64>, kind: SpecialKind, cfg: &SearchConfig) -> Result<SpecialElementSet> {
    if !matches!(kind, SpecialKind::ComplexIdempotent | SpecialKind::ComplexSquareZero) {
        return Err(Error::InvalidParams("complexified search needs a complex kind".into()));
    }
    if !m.is_euclidean() {
        return Err(Error::NotEuclidean);
    }
    let n = m.dim();
    let offset = COMPLEX_STREAM + if kind == SpecialKind::ComplexIdempotent { 0 } else { 1 << 40 };
    let roots: Vec<ComplexRoot> = (0..cfg.starts)
        .into_par_iter()
        .filter_map(|s| {
            let mut rng = stream_rng(cfg.seed, offset + s as u64);
            let z = gaussian(&mut rng, 2 * n);
            // idempotents are not scale invariant: spread start radii log-uniformly over [1/4, 4]
            let radius = if kind == SpecialKind::ComplexIdempotent { 4f64.powf(rng.random_range(-1.0..1.0)) } else { 1.0 };
            let z = linalg::scale(&(radius / euclid(&z)), &z);
            complex_gauss_newton(m, z, kind, cfg.iterations)
        })
        .collect();
    let commutative = m.algebra().is_commutative();
    let mut elements: Vec<SpecialElement> = Vec::new();
    let mut seen: Vec<Vec<f64>> = Vec::new();
    let mut roots = roots;
    roots.sort_by(|p, q| {
        p.a.iter().chain(&p.b).zip(q.a.iter().chain(&q.b)).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    for r in roots {
        let key = [r.a.clone(), r.b.clone()].concat();
        if seen.iter().any(|s| linalg::max_abs(&linalg::sub(s, &key)) <= DEDUP) {
            continue;
        }
        seen.push(key);
        let independent = {
            let h = m.form();
            let (qa, qb, hab) = (h.quad(&r.a), h.quad(&r.b), h.eval(&r.a, &r.b));
            euclid(&r.a) > DEDUP && euclid(&r.b) > DEDUP && qa * qb - hab * hab > 1e-8 * qa * qb
        };
        let sect_check = (commutative && independent).then(|| {
            let s = sectional::sect(m, &r.a, &r.b).unwrap_or(f64::NAN);
            let h = m.form();
            let hab = h.eval(&r.a, &r.b);
            let gram = h.quad(&r.a) * h.quad(&r.b) - hab * hab;
            let predicted = match kind {
                SpecialKind::ComplexSquareZero => h.quad(&m.mul(&r.a, &r.a)) / gram,
                _ => (h.quad(&m.mul(&r.b, &r.b)) + 0.25 * h.quad(&r.b)) / gram,
            };
            (s, predicted)
        });
        elements.push(SpecialElement {
            spectrum: vec![],
            norm: m.form().quad(&r.a) + m.form().quad(&r.b),
            coords: r.a,
            imag: Some(r.b),
            residual: r.residual,
            orthogonal_spectrum: None,
            exact: None,
            sect_check,
            tail: r.tail,
        });
    }
    Ok(SpecialElementSet { kind, elements, starts: cfg.starts, seed: cfg.seed })
}

/// Largest `4·sect(e, x) − 1/h(e, e)` over `samples` random `x`; nonpositive when the
/// eigenvalue bound for the idempotent `e` holds.
pub fn eigensect_excess(m: &MetrizedAlgebra<f64>, e: &[f64], samples: usize, seed: u64) -> Result<f64> {
    check_dim(m.dim(), e.len())?;
    let hee = m.form().quad(e);
    if hee.abs() <= 1e-12 {
        return Err(Error::Isotropic);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut rng = stream_rng(seed, 1 << 46);
    for _ in 0..samples {
        let x = gaussian(&mut rng, m.dim());
        if let Ok(s) = sectional::sect(m, e, &x) {
            worst = worst.max(4.0 * s - 1.0 / hee);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::linalg::BilinearForm;
    use crate::scalar::rat;

    fn cfg() -> SearchConfig {
        SearchConfig { starts: 128, iterations: 200, seed: 7 }
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(27 * 4), (6, 3));
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(30), (1, 30));
    }

    #[test]
    fn surd_recovery() {
        let x = 2.0 / (3.0 * 3f64.sqrt());
        let s = recover_coordinate(x).unwrap();
        assert_eq!(s.render(), "2/9*sqrt(3)");
        assert_eq!(recover_coordinate(-0.75).unwrap().render(), "-3/4");
        // √2·√6 = 2√3
        let p = SurdSum::term(rat(1, 1), 2).mul(&SurdSum::term(rat(1, 1), 6));
        assert_eq!(p.render(), "2*sqrt(3)");
    }

    #[test]
    fn star_has_all_ones_idempotent() {
        let p = presets::r3_star().unwrap();
        let set = find_idempotents(&p.metrized, &cfg()).unwrap();
        let hit = set.elements.iter().find(|e| e.coords.iter().all(|v| (v - 1.0).abs() < 1e-9));
        let e = hit.expect("(1,1,1) not found");
        assert!(e.exact.as_ref().unwrap().verified);
    }

    #[test]
    fn herm2_projections() {
        let p = presets::herm(2, 0).unwrap();
        let set = find_idempotents(&p.metrized, &cfg()).unwrap();
        assert!(set.len() >= 3);
        let m = p.float();
        for e in &set.elements {
            assert!(e.residual <= 1e-9);
            let sq = m.mul(&e.coords, &e.coords);
            assert!(linalg::max_abs(&linalg::sub(&sq, &e.coords)) < 1e-9);
        }
        // the identity, plus rank-one projections (trace 1) from the circle through e11 and e22
        assert!(set.elements.iter().any(|e| linalg::max_abs(&linalg::sub(&e.coords, &[1.0, 1.0, 0.0])) < 1e-6));
        assert!(set.elements.iter().filter(|e| (e.coords[0] + e.coords[1] - 1.0).abs() < 1e-9).count() >= 2);
        for target in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
            assert_eq!(m.mul(&target, &target), target.to_vec());
        }
        for (i, a) in set.elements.iter().enumerate() {
            for b in &set.elements[i + 1..] {
                assert!(distance(&m, &a.coords, &b.coords) > DEDUP);
            }
        }
    }

    #[test]
    fn c_eps_orthogonal_spectrum_of_unit_direction() {
        let p = presets::c_epsilon(&rat(3, 10)).unwrap();
        let s = orthogonal_spectrum(&p.float(), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.exact.unwrap(), vec!["1/5".to_string(), "4/5".to_string()]);
    }

    #[test]
    fn herm2_diagonal_projection_spectrum() {
        // e₁₁^⊥ = span(e₂₂, sym(1,2)): L(e₁₁) is 0 on e₂₂ and ½ on the off-diagonal part
        let p = presets::herm(2, 0).unwrap();
        let s = orthogonal_spectrum(&p.float(), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.exact.unwrap(), vec!["0".to_string(), "1/2".to_string()]);
    }

    #[test]
    fn herm_identity_spectrum_is_one() {
        let p = presets::herm(3, 0).unwrap();
        let e = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let s = orthogonal_spectrum(&p.float(), &e).unwrap();
        assert_eq!(s.values.len(), 5);
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn isotropic_rejected() {
        let p = presets::two_step_double().unwrap();
        let mut e = vec![0.0; 6];
        e[0] = 1.0;
        assert!(matches!(orthogonal_spectrum(&p.float(), &e), Err(Error::Isotropic)));
    }

    #[test]
    fn structure_flags_examples() {
        let e = presets::e_algebra(4).unwrap();
        assert!(structural_report(&e.metrized, &[]).unwrap().exact);
        let h = presets::herm(3, 0).unwrap();
        let r = structural_report(&h.metrized, &[]).unwrap();
        assert!(!r.exact && r.faithful);
        let h2 = presets::herm(2, 0).unwrap();
        assert_eq!(structural_report(&h2.metrized, &[vec![1.0, 1.0, 0.0]]).unwrap().psd, vec![true]);
        let z = presets::two_step_double().unwrap();
        assert!(!structural_report(&z.metrized, &[]).unwrap().faithful);
    }

    #[test]
    fn anticommutative_everything_square_zero() {
        let p = presets::cross(3).unwrap();
        let set = find_square_zero(&p.metrized, &SearchConfig { starts: 8, ..cfg() }).unwrap();
        assert_eq!(set.len(), 8);
        assert!(set.elements.iter().all(|e| e.residual == 0.0));
    }

    #[test]
    fn zero_product_complex_square_zero() {
        let m = MetrizedAlgebra::new(Algebra::<f64>::zero_product(3).unwrap(), BilinearForm::identity(3)).unwrap();
        let set = complexified_search(&m, SpecialKind::ComplexSquareZero, &SearchConfig { starts: 4, ..cfg() }).unwrap();
        assert_eq!(set.len(), 4);
        for e in &set.elements {
            let (s, pred) = e.sect_check.unwrap();
            assert_eq!(s, 0.0);
            assert_eq!(pred, 0.0);
        }
    }

    #[test]
    fn c_eps_zero_complex_square_zero() {
        let p = presets::c_epsilon(&rat(0, 1)).unwrap();
        let m = p.float();
        let set = complexified_search(&m, SpecialKind::ComplexSquareZero, &cfg()).unwrap();
        assert!(!set.is_empty());
        let mut checked = 0;
        for e in &set.elements {
            assert!(e.residual <= 1e-9);
            if let Some((s, pred)) = e.sect_check {
                assert!((s - pred).abs() < 1e-7, "{s} vs {pred}");
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn complex_idempotents_have_positive_sect() {
        // at ε = 1/4 the branch through f₁ has v² = −8
        let p = presets::c_epsilon(&rat(1, 4)).unwrap();
        let m = p.float();
        let set = complexified_search(&m, SpecialKind::ComplexIdempotent, &cfg()).unwrap();
        let mut checked = 0;
        for e in &set.elements {
            if let Some((s, pred)) = e.sect_check {
                assert!(s > 0.0);
                assert!((s - pred).abs() < 1e-7 * pred.abs().max(1.0), "{s} vs {pred}");
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn newton_converges_quadratically() {
        let p = presets::c_epsilon(&rat(1, 1)).unwrap();
        let set = find_idempotents(&p.metrized, &cfg()).unwrap();
        for e in &set.elements {
            let t = &e.tail;
            if t.len() == 3 && t[0] < 1e-2 {
                assert!(t[1] <= 100.0 * t[0] * t[0] + 1e-14, "{t:?}");
                assert!(t[2] <= 100.0 * t[1] * t[1] + 1e-14, "{t:?}");
            }
        }
    }
}
