//! Sectional nonassociativity, constant-sect certification, extremal bounds and the
//! commutator-norm constant.

use serde::Serialize;

use crate::algebra::{DerivedKind, MetrizedAlgebra};
use crate::cayley_dickson::{self as cd, HMatrix};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, BilinearForm, Definiteness};
use crate::optimize::{self, BracketObjective, Goal, OptimizerConfig, PlaneObjective, SectObjective};
use crate::scalar::Scalar;
use crate::tensor::{self, Rank4Tensor};

pub use crate::tensor::kulkarni;

/// A pair spanning an h-nondegenerate plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub gram: T,
}

impl<T: Scalar> Plane<T> {
    pub fn new(h: &BilinearForm<T>, x: &[T], y: &[T]) -> Result<Self> {
        check_dim(h.dim(), x.len())?;
        check_dim(h.dim(), y.len())?;
        if is_dependent(x, y) {
            return Err(Error::LinearDependence);
        }
        let (hxx, hyy, hxy) = (h.quad(x), h.quad(y), h.eval(x, y));
        let gram = hxx.clone() * hyy.clone() - hxy.clone() * hxy.clone();
        let degenerate = match T::MODE {
            crate::scalar::NumericMode::Rational => gram.is_zero(),
            crate::scalar::NumericMode::Float => {
                let scale = (hxx * hyy).abs().to_f64().max((hxy.clone() * hxy).to_f64());
                gram.abs().to_f64() <= 1e-12 * scale
            }
        };
        if degenerate {
            return Err(Error::DegeneratePlane { gram: gram.to_f64() });
        }
        Ok(Plane { x: x.to_vec(), y: y.to_vec(), gram })
    }
}

fn is_dependent<T: Scalar>(x: &[T], y: &[T]) -> bool {
    let scale = linalg::max_abs(x).to_f64() * linalg::max_abs(y).to_f64();
    if scale == 0.0 {
        return true;
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let minor = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
            let nonzero = match T::MODE {
                crate::scalar::NumericMode::Rational => !minor.is_zero(),
                crate::scalar::NumericMode::Float => minor.abs().to_f64() > 1e-12 * scale,
            };
            if nonzero {
                return false;
            }
        }
    }
    true
}

/// `sect(x, y) = h([x,x,y], y) / gram`. For an invariant metric this equals
/// `(h(x•x, y•y) − h(x•y, y•x)) / gram` (see `sect_products`).
pub fn sect<T: Scalar>(m: &MetrizedAlgebra<T>, x: &[T], y: &[T]) -> Result<T> {
    let p = Plane::new(m.form(), x, y)?;
    let a = m.algebra();
    Ok(m.h(&a.assoc(x, x, y), y) / p.gram)
}

/// `(h(x•x, y•y) − h(x•y, y•x)) / gram`
pub fn sect_products<T: Scalar>(m: &MetrizedAlgebra<T>, x: &[T], y: &[T]) -> Result<T> {
    let p = Plane::new(m.form(), x, y)?;
    let (xx, yy, xy, yx) = (m.mul(x, x), m.mul(y, y), m.mul(x, y), m.mul(y, x));
    Ok((m.h(&xx, &yy) - m.h(&xy, &yx)) / p.gram)
}

/// `(sect_∘, sect_[,])` for the symmetrized and bracket products on the same metric;
/// they sum to `4 sect`.
pub fn sect_split<T: Scalar>(m: &MetrizedAlgebra<T>, x: &[T], y: &[T]) -> Result<(T, T)> {
    let s = m.derived(DerivedKind::Symmetrized)?;
    let b = m.derived(DerivedKind::Bracket)?;
    Ok((sect(&s, x, y)?, sect(&b, x, y)?))
}

/// Returns `c` when `P(ℛ♭ + ℛ̄♭) = −2c (h∧h)` entrywise, i.e. `sect ≡ c` on all
/// nondegenerate planes. In dimension 1 there are no planes and the value is `0`.
pub fn constant_sect<T: Scalar>(m: &MetrizedAlgebra<T>) -> Result<Option<T>> {
    if m.dim() < 2 {
        return Ok(Some(T::zero()));
    }
    let t = tensor::curvature_flat(m)?;
    let (p, _) = tensor::project_curvature(&t)?;
    let k = kulkarni(m.form());
    Ok(solve_multiple(&p, &k).map(|lambda| -lambda / T::from_i64(2)))
}

/// The scalar `λ` with `p = λ k`, if any.
fn solve_multiple<T: Scalar>(p: &Rank4Tensor<T>, k: &Rank4Tensor<T>) -> Option<T> {
    let pivot = k
        .entries()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap_or(std::cmp::Ordering::Equal))?;
    if pivot.1.is_zero() {
        return None;
    }
    let lambda = p.entries()[pivot.0].clone() / pivot.1.clone();
    let ok = p
        .entries()
        .iter()
        .zip(k.entries())
        .all(|(a, b)| (a.clone() - lambda.clone() * b.clone()).negligible());
    ok.then_some(lambda)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PlaneWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BoundsReport {
    pub bwl: f64,
    pub bwu: f64,
    pub witness_low: PlaneWitness,
    pub witness_high: PlaneWitness,
    pub starts: usize,
    pub seed: u64,
    pub iterations: usize,
    pub samples: usize,
    pub converged_low: usize,
    pub converged_high: usize,
}

/// Multi-start estimates of `inf sect` and `sup sect` over Gr(2, n) for an invariant
/// Euclidean metric.
pub fn estimate_extrema(m: &MetrizedAlgebra<f64>, cfg: &OptimizerConfig) -> Result<BoundsReport> {
    if !m.is_euclidean() {
        return Err(Error::NotEuclidean);
    }
    if !m.is_invariant() {
        let r = m.report();
        return Err(Error::NotInvariant { defect: r.max_defect, witness: r.witness.unwrap_or((0, 0, 0)) });
    }
    if m.dim() < 2 {
        return Err(Error::InvalidParams("need dim ≥ 2 for planes".into()));
    }
    let obj = SectObjective::new(m);
    let (hi, hi_runs) = optimize::multi_start(&obj, Goal::Maximize, cfg, 0);
    let (lo, lo_runs) = optimize::multi_start(&obj, Goal::Minimize, cfg, 1 << 32);
    let witness = |r: &optimize::StartResult| PlaneWitness { x: r.x.clone(), y: r.y.clone(), value: r.value };
    Ok(BoundsReport {
        bwl: lo.value,
        bwu: hi.value,
        witness_low: witness(&lo),
        witness_high: witness(&hi),
        starts: cfg.starts,
        seed: cfg.seed,
        iterations: hi_runs.iter().chain(&lo_runs).map(|r| r.iterations).sum(),
        samples: 0,
        converged_low: lo_runs.iter().filter(|r| r.converged).count(),
        converged_high: hi_runs.iter().filter(|r| r.converged).count(),
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BwReport {
    /// `sup |[x,y]|² / (|x|²|y|²)`
    pub sup_normalized: f64,
    /// `sup |[x,y]|² / (|x|²|y|² − f(x,y)²)`
    pub sup_grassmann: f64,
    pub gap: f64,
    pub sample_sup_normalized: f64,
    pub sample_sup_grassmann: f64,
    pub optimized_sup: f64,
    pub witness: PlaneWitness,
    pub starts: usize,
    pub seed: u64,
    pub samples: usize,
    pub iterations: usize,
}

/// `(|[x,y]|²/(|x|²|y|²), |[x,y]|²/(|x|²|y|² − f(x,y)²))`
pub fn bw_ratios(a: &crate::algebra::Algebra<f64>, f: &BilinearForm<f64>, x: &[f64], y: &[f64]) -> (f64, f64) {
    let k = f.quad(&a.mul(x, y));
    let (fxx, fyy, fxy) = (f.quad(x), f.quad(y), f.eval(x, y));
    (k / (fxx * fyy), k / (fxx * fyy - fxy * fxy))
}

/// Estimates both commutator-norm suprema by random sampling plus multi-start optimization.
pub fn bw_constant(a: &crate::algebra::Algebra<f64>, f: &BilinearForm<f64>, cfg: &OptimizerConfig) -> Result<BwReport> {
    check_dim(a.dim(), f.dim())?;
    if f.inertia().definiteness() != Definiteness::PositiveDefinite {
        return Err(Error::NotPositiveDefinite);
    }
    let obj = BracketObjective::new(a, f)?;
    let (samp_g, samp_n, _) = optimize::sample_sup(&obj, cfg.samples, cfg.seed, 1 << 40);
    let (best, runs) = optimize::multi_start(&obj, Goal::Maximize, cfg, 0);
    // the optimizer frame is f-orthonormal, so both ratios coincide there
    let (opt_n, opt_g) = bw_ratios(a, f, &best.x, &best.y);
    let sup_normalized = samp_n.max(opt_n);
    let sup_grassmann = samp_g.max(opt_g);
    Ok(BwReport {
        sup_normalized,
        sup_grassmann,
        gap: (sup_grassmann - sup_normalized).abs(),
        sample_sup_normalized: samp_n,
        sample_sup_grassmann: samp_g,
        optimized_sup: obj.value(&best.x, &best.y),
        witness: PlaneWitness { x: best.x.clone(), y: best.y.clone(), value: best.value },
        starts: cfg.starts,
        seed: cfg.seed,
        samples: cfg.samples,
        iterations: runs.iter().map(|r| r.iterations).sum(),
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CdkReport {
    pub n: usize,
    pub level: u32,
    pub samples: usize,
    pub seed: u64,
    pub diagonal_x: bool,
    /// Largest `|[x,y]|² / (2(|x|²|y|² − f(x,y)²))` seen.
    pub max_ratio: f64,
    pub violations: usize,
    pub equality_witness: (f64, f64),
    pub passed: bool,
}

const CDK_TOL: f64 = 1e-9;

fn random_hermitian(rng: &mut impl rand::Rng, n: usize, level: u32, diagonal: bool) -> HMatrix<f64> {
    let d = cd::hurwitz_dim(level);
    let mut m = HMatrix::<f64>::zero(n, level);
    for i in 0..n {
        let mut v = vec![0.0; d];
        v[0] = optimize::gaussian(rng, 1)[0];
        m.set(i, i, v);
        if diagonal {
            continue;
        }
        for j in i + 1..n {
            let v = optimize::gaussian(rng, d);
            m.set(j, i, cd::conj(&v));
            m.set(i, j, v);
        }
    }
    m
}

/// `|[x,y]|² ≤ 2(|x|²|y|² − f(x,y)²) ≤ 2|x|²|y|²` on random Hermitian pairs. Level 3 needs
/// `n = 3` and diagonal `x`, unless `exploratory` samples general `x` (no claim is made then).
pub fn cdk_verify(n: usize, level: u32, samples: usize, seed: u64, exploratory: bool) -> Result<CdkReport> {
    if n < 2 || level > 3 || (level == 3 && n != 3) {
        return Err(Error::InvalidParams(format!("cdk needs n ≥ 2, level ≤ 3 and n = 3 at level 3; got n={n}, level={level}")));
    }
    let diagonal_x = level == 3 && !exploratory;
    let mut rng = optimize::stream_rng(seed, 0);
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    let check = |x: &HMatrix<f64>, y: &HMatrix<f64>| {
        let c = x.commutator(y);
        let lhs = c.frobenius(&c);
        let (xx, yy, xy) = (x.frobenius(x), y.frobenius(y), x.frobenius(y));
        let mid = 2.0 * (xx * yy - xy * xy);
        let rhs = 2.0 * xx * yy;
        (lhs, mid, rhs)
    };
    for _ in 0..samples {
        let x = random_hermitian(&mut rng, n, level, diagonal_x);
        let y = random_hermitian(&mut rng, n, level, false);
        let (lhs, mid, rhs) = check(&x, &y);
        if mid > 0.0 {
            max_ratio = max_ratio.max(lhs / mid);
        }
        if lhs > mid + CDK_TOL * rhs.max(1.0) || mid > rhs + CDK_TOL * rhs.max(1.0) {
            violations += 1;
        }
    }
    let mut ex = HMatrix::<f64>::zero(n, level);
    let d = cd::hurwitz_dim(level);
    ex.set(0, 0, linalg::basis(d, 0));
    ex.set(n - 1, n - 1, linalg::scale(&-1.0, &linalg::basis(d, 0)));
    let mut ey = HMatrix::<f64>::zero(n, level);
    ey.set(0, n - 1, linalg::basis(d, 0));
    ey.set(n - 1, 0, linalg::basis(d, 0));
    let (lhs, mid, _) = check(&ex, &ey);
    Ok(CdkReport {
        n,
        level,
        samples,
        seed,
        diagonal_x,
        max_ratio,
        violations,
        equality_witness: (lhs, mid),
        passed: violations == 0 && (lhs - mid).abs() <= CDK_TOL,
    })
}

/// Range of `sect` over random Gaussian planes.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SectSamples {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub seed: u64,
    pub witness_min: PlaneWitness,
    pub witness_max: PlaneWitness,
}

/// Evaluates `sect` on `samples` random planes in deterministic chunks.
pub fn sample_sect(m: &MetrizedAlgebra<f64>, samples: usize, seed: u64) -> Result<SectSamples> {
    use rayon::prelude::*;
    const CHUNK: usize = 4096;
    if m.dim() < 2 {
        return Err(Error::InvalidParams("need dim ≥ 2 for planes".into()));
    }
    let n = m.dim();
    let empty = || PlaneWitness { x: vec![], y: vec![], value: f64::NAN };
    let parts: Vec<(usize, PlaneWitness, PlaneWitness)> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = optimize::stream_rng(seed, (1 << 44) + c as u64);
            let (mut lo, mut hi) = (empty(), empty());
            let mut count = 0;
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let x = optimize::gaussian(&mut rng, n);
                let y = optimize::gaussian(&mut rng, n);
                let Ok(v) = sect(m, &x, &y) else { continue };
                count += 1;
                if !(v >= lo.value) {
                    lo = PlaneWitness { x: x.clone(), y: y.clone(), value: v };
                }
                if !(v <= hi.value) {
                    hi = PlaneWitness { x, y, value: v };
                }
            }
            (count, lo, hi)
        })
        .collect();
    let (mut lo, mut hi, mut count) = (empty(), empty(), 0);
    for (c, l, h) in parts {
        count += c;
        if !(l.value >= lo.value) {
            lo = l;
        }
        if !(h.value <= hi.value) {
            hi = h;
        }
    }
    Ok(SectSamples { min: lo.value, max: hi.value, count, seed, witness_min: lo, witness_max: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::scalar::{rat, Rat};

    fn r(v: i64) -> Rat {
        rat(v, 1)
    }

    #[test]
    fn negative_killing_form_on_so3_gives_one_half() {
        let p = presets::so3_killing().unwrap();
        let m = p.rational().unwrap();
        assert_eq!(constant_sect(m).unwrap(), Some(rat(1, 2)));
        let (x, y) = (vec![r(1), r(2), r(0)], vec![r(0), r(-1), r(3)]);
        assert_eq!(sect(m, &x, &y).unwrap(), rat(1, 2));
    }

    #[test]
    fn cross_sect_is_one() {
        let p = presets::cross(3).unwrap();
        let m = p.rational().unwrap();
        let x = vec![r(1), r(2), r(-1)];
        let y = vec![rat(1, 3), r(0), r(5)];
        assert_eq!(sect(m, &x, &y).unwrap(), r(1));
        assert_eq!(sect_products(m, &x, &y).unwrap(), r(1));
    }

    #[test]
    fn plane_errors() {
        let p = presets::cross(3).unwrap();
        let m = p.rational().unwrap();
        let x = vec![r(1), r(2), r(-1)];
        assert!(matches!(sect(m, &x, &linalg::scale(&r(3), &x)), Err(Error::LinearDependence)));
        let d = presets::two_step_double().unwrap();
        let dm = d.rational().unwrap();
        // X1 and X2 span a totally isotropic plane
        let e = |i| linalg::basis::<Rat>(6, i);
        assert!(matches!(sect(dm, &e(0), &e(1)), Err(Error::DegeneratePlane { .. })));
    }

    #[test]
    fn herm_upper_witness() {
        let p = presets::herm(3, 0).unwrap();
        let m = p.rational().unwrap();
        // e11 − e33 and e13 + e31 (basis: e11,e22,e33,s12,s13,s23)
        let x = vec![r(1), r(0), r(-1), r(0), r(0), r(0)];
        let y = vec![r(0), r(0), r(0), r(0), r(1), r(0)];
        assert_eq!(sect(m, &x, &y).unwrap(), rat(3, 2));
    }

    #[test]
    fn c_epsilon_constant() {
        let p = presets::c_epsilon(&rat(3, 10)).unwrap();
        assert_eq!(constant_sect(p.rational().unwrap()).unwrap(), Some(rat(4, 25)));
    }

    #[test]
    fn non_constant_is_none() {
        let p = presets::herm(2, 0).unwrap();
        assert_eq!(constant_sect(p.rational().unwrap()).unwrap(), None);
    }

    #[test]
    fn extrema_needs_euclidean() {
        let d = presets::two_step_double().unwrap();
        assert!(matches!(estimate_extrema(&d.float(), &OptimizerConfig::default()), Err(Error::NotEuclidean)));
    }

    #[test]
    fn bw_needs_positive_form() {
        let p = presets::matrix_lie(1, 2).unwrap();
        let m = p.float();
        let f = m.form().scale(&-1.0);
        assert!(matches!(bw_constant(m.algebra(), &f, &OptimizerConfig::default()), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn cdk_equality_case() {
        let rep = cdk_verify(3, 0, 100, 1, false).unwrap();
        assert_eq!(rep.equality_witness, (8.0, 8.0));
        assert!(rep.passed);
        assert!(cdk_verify(4, 3, 1, 1, false).is_err());
    }
}
