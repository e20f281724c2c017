//! Named constructions of concrete metrized algebras.

use std::collections::BTreeMap;

use num::complex::Complex64;
use serde::Serialize;

use crate::algebra::{AnyMetrized, Algebra, DerivedKind, MetrizedAlgebra};
use crate::cayley_dickson::{self as cd, HMatrix};
use crate::error::{Error, Result};
use crate::identities::{scan_tuples, DefectReport};
use crate::linalg::{self, BilinearForm, LinearMap};
use crate::scalar::{format_rational, parse_rational, rat, Rat, Scalar};

#[derive(Debug, Clone, Serialize)]
pub struct PresetDescriptor {
    pub name: String,
    pub params: BTreeMap<String, String>,
    /// Short description of the construction.
    pub construction: String,
    /// Known facts: constant sect value, identities expected to pass, bounds.
    pub expected: BTreeMap<String, String>,
}

/// A built preset with the auxiliary data its construction provides.
#[derive(Debug, Clone)]
pub struct Preset {
    pub descriptor: PresetDescriptor,
    pub metrized: AnyMetrized,
    pub unit: Option<Vec<Rat>>,
    pub conjugation: Option<LinearMap<Rat>>,
    /// Norm form `q` of a composition algebra, `h` being its polarization.
    pub norm: Option<BilinearForm<Rat>>,
    pub metric_invariant: bool,
}

impl Preset {
    pub fn dim(&self) -> usize {
        self.metrized.dim()
    }

    pub fn rational(&self) -> Result<&MetrizedAlgebra<Rat>> {
        self.metrized.as_rational().ok_or(Error::ModeMismatch)
    }

    pub fn float(&self) -> MetrizedAlgebra<f64> {
        self.metrized.to_f64()
    }
}

/// Catalog entries: `(name, parameter syntax, description)`.
pub const CATALOG: &[(&str, &str, &str)] = &[
    ("hurwitz", "level (0..3)", "Cayley–Dickson algebra ℝ, ℂ, ℍ, 𝕆 with h the polarization of the norm"),
    ("para_hurwitz", "level (0..3)", "x∘y = x̄ȳ on a Hurwitz algebra"),
    ("cross", "dim (3|7)", "half commutator on the imaginary part of ℍ or 𝕆"),
    ("imo_commutator", "", "full commutator on Im 𝕆"),
    ("herm", "n:level", "Hermitian matrices, ½(xy+yx), h = (1/n) Re tr(xy)"),
    ("mat", "n:level (level ≤ 2)", "full matrix algebra with the matrix product and the Frobenius form"),
    ("c_epsilon", "epsilon (rational)", "three-dimensional commutative family f₀, f₁, f₂"),
    ("e_algebra", "n (≥ 3)", "modified coordinatewise product with its Killing metric"),
    ("kosier", "", "antiflexible, not power-associative product on ℝ³"),
    ("sl2_kosier_bracket", "", "bracket of the Kosier product with its Killing form"),
    ("r3_star", "", "x⋆y = (x₂y₃, x₃y₁, x₁y₂) with the Euclidean metric"),
    ("so3_killing", "", "cross product on ℝ³ with the negative Killing form"),
    ("two_step_double", "", "free 2-step nilpotent Lie algebra on two generators, doubled by its dual"),
    ("matrix_lie", "n:level", "mat(n, K) under the commutator with the Frobenius form"),
    ("su", "n", "su(n) under the commutator with the Frobenius form"),
    ("so", "n", "so(n) under the commutator with the Frobenius form"),
    ("okubo_compact", "", "compact Okubo algebra on su(3) (float)"),
];

fn descriptor(name: &str, params: &[(&str, String)], construction: &str) -> PresetDescriptor {
    PresetDescriptor {
        name: name.to_string(),
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        construction: construction.to_string(),
        expected: BTreeMap::new(),
    }
}

fn r(v: i64) -> Rat {
    rat(v, 1)
}

fn plain(desc: PresetDescriptor, m: MetrizedAlgebra<Rat>) -> Preset {
    let inv = m.is_invariant();
    Preset { descriptor: desc, metrized: AnyMetrized::Rational(m), unit: None, conjugation: None, norm: None, metric_invariant: inv }
}

fn expect(mut p: Preset, facts: &[(&str, &str)]) -> Preset {
    for (k, v) in facts {
        p.descriptor.expected.insert(k.to_string(), v.to_string());
    }
    p
}

fn parse_usize(s: Option<&&str>, what: &str) -> Result<usize> {
    s.ok_or_else(|| Error::InvalidParams(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::InvalidParams(format!("bad {what}: {}", s.unwrap())))
}

fn parse_level(s: Option<&&str>) -> Result<u32> {
    let l = parse_usize(s, "level")? as u32;
    if l > 3 {
        return Err(Error::InvalidParams(format!("level must be 0..=3, got {l}")));
    }
    Ok(l)
}

/// Builds a preset from its name and colon-separated parameters.
pub fn build(name: &str, params: &[&str]) -> Result<Preset> {
    let p0 = params.first();
    let p1 = params.get(1);
    match name {
        "hurwitz" => hurwitz(parse_level(p0)?),
        "para_hurwitz" => para_hurwitz(parse_level(p0)?),
        "cross" => cross(parse_usize(p0, "dim")?),
        "imo_commutator" => imo_commutator(),
        "herm" => herm(parse_usize(p0, "n")?, parse_level(p1)?),
        "mat" => matrix_associative(parse_usize(p0, "n")?, parse_level(p1)?),
        "c_epsilon" => {
            let s = p0.ok_or_else(|| Error::InvalidParams("missing epsilon".into()))?;
            let eps = parse_rational(s).ok_or_else(|| Error::InvalidParams(format!("bad epsilon: {s}")))?;
            c_epsilon(&eps)
        }
        "e_algebra" => e_algebra(parse_usize(p0, "n")?),
        "kosier" => kosier(),
        "sl2_kosier_bracket" => sl2_kosier_bracket(),
        "r3_star" => r3_star(),
        "so3_killing" => so3_killing(),
        "two_step_double" => two_step_double(),
        "matrix_lie" => matrix_lie(parse_usize(p0, "n")?, parse_level(p1)?),
        "su" => su(parse_usize(p0, "n")?),
        "so" => so(parse_usize(p0, "n")?),
        "okubo_compact" => okubo_compact(),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Parses `preset:name:p1:p2` or `name:p1:p2`, with an optional `+bracket`, `+symmetrized`
/// or `+adjoint` suffix selecting a derived product on the same metric.
pub fn from_address(addr: &str) -> Result<Preset> {
    let addr = addr.strip_prefix("preset:").unwrap_or(addr);
    let (body, derived) = match addr.split_once('+') {
        Some((b, d)) => (b, Some(d)),
        None => (addr, None),
    };
    let mut parts = body.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    let p = build(name, &params)?;
    match derived {
        None => Ok(p),
        Some(d) => {
            let kind = match d {
                "bracket" => DerivedKind::Bracket,
                "symmetrized" => DerivedKind::Symmetrized,
                "adjoint" => DerivedKind::Adjoint,
                other => return Err(Error::InvalidParams(format!("unknown derived product {other}"))),
            };
            derive(&p, kind)
        }
    }
}

/// The same metric with a derived product.
pub fn derive(p: &Preset, kind: DerivedKind) -> Result<Preset> {
    let metrized = match &p.metrized {
        AnyMetrized::Rational(m) => AnyMetrized::Rational(m.derived(kind)?),
        AnyMetrized::Float(m) => AnyMetrized::Float(m.derived(kind)?),
    };
    let mut descriptor = p.descriptor.clone();
    descriptor.params.insert("derived".into(), format!("{kind:?}").to_lowercase());
    descriptor.expected.clear();
    let metric_invariant = metrized.report().invariant;
    Ok(Preset { descriptor, metrized, unit: None, conjugation: None, norm: None, metric_invariant })
}

pub fn is_preset_address(s: &str) -> bool {
    if s.starts_with("preset:") {
        return true;
    }
    let name = s.split(['+', ':']).next().unwrap_or_default();
    CATALOG.iter().any(|(n, _, _)| *n == name)
}

pub fn hurwitz(level: u32) -> Result<Preset> {
    let a = cd::hurwitz_algebra::<Rat>(level)?;
    let d = a.dim();
    let h = BilinearForm::identity(d).scale(&r(2));
    let m = MetrizedAlgebra::with_form(a, h)?;
    let conjugation = LinearMap::from_columns(&(0..d).map(|i| cd::conj(&linalg::basis::<Rat>(d, i))).collect::<Vec<_>>());
    let desc = descriptor("hurwitz", &[("level", level.to_string())], CATALOG[0].2);
    let mut p = plain(desc, m);
    p.unit = Some(linalg::basis(d, 0));
    p.conjugation = Some(conjugation);
    p.norm = Some(cd::hurwitz_norm(level));
    Ok(expect(p, &[("constant_sect", "0"), ("passes", "alternative,flexible")]))
}

pub fn para_hurwitz(level: u32) -> Result<Preset> {
    let d = cd::hurwitz_dim(level);
    let a = Algebra::from_products(d, |i, j| {
        cd::cd_mul(&cd::conj(&linalg::basis::<Rat>(d, i)), &cd::conj(&linalg::basis(d, j)))
    })?;
    let m = MetrizedAlgebra::new(a, BilinearForm::identity(d).scale(&r(2)))?;
    let desc = descriptor("para_hurwitz", &[("level", level.to_string())], CATALOG[1].2);
    let mut p = plain(desc, m);
    p.unit = Some(linalg::basis(d, 0));
    p.norm = Some(cd::hurwitz_norm(level));
    let facts: &[(&str, &str)] = if level <= 1 { &[("constant_sect", "-1")] } else { &[("bwl", "-1"), ("bwu", "1")] };
    Ok(expect(p, facts))
}

fn imaginary_algebra(level: u32, s: &Rat) -> Result<Algebra<Rat>> {
    let d = cd::hurwitz_dim(level);
    let m = d - 1;
    let emb = |i: usize| linalg::basis::<Rat>(d, i + 1);
    Algebra::from_products(m, |i, j| {
        let (x, y) = (emb(i), emb(j));
        let c = linalg::sub(&cd::cd_mul(&x, &y), &cd::cd_mul(&y, &x));
        debug_assert!(c[0].negligible());
        c[1..].iter().map(|v| s.clone() * v.clone()).collect()
    })
}

pub fn cross(dim: usize) -> Result<Preset> {
    let level = match dim {
        3 => 2,
        7 => 3,
        _ => return Err(Error::InvalidParams(format!("cross products exist in dims 3 and 7, got {dim}"))),
    };
    let a = imaginary_algebra(level, &rat(1, 2))?;
    let m = MetrizedAlgebra::new(a, BilinearForm::identity(dim))?;
    let p = plain(descriptor("cross", &[("dim", dim.to_string())], CATALOG[2].2), m);
    Ok(expect(p, &[("constant_sect", "1")]))
}

pub fn imo_commutator() -> Result<Preset> {
    let a = imaginary_algebra(3, &r(1))?;
    let m = MetrizedAlgebra::new(a, BilinearForm::identity(7))?;
    let p = plain(descriptor("imo_commutator", &[], CATALOG[3].2), m);
    Ok(expect(p, &[("passes", "malcev"), ("fails", "lie_admissible")]))
}

/// Coordinates of a Hermitian matrix in the basis of `hermitian_basis`.
pub fn herm_coords<T: Scalar>(m: &HMatrix<T>) -> Vec<T> {
    let n = m.n;
    let mut out: Vec<T> = (0..n).map(|i| m.get(i, i)[0].clone()).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.extend(m.get(i, j).iter().cloned());
        }
    }
    out
}

pub fn herm_dim(n: usize, level: u32) -> usize {
    n + cd::hurwitz_dim(level) * n * (n - 1) / 2
}

pub fn herm(n: usize, level: u32) -> Result<Preset> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("herm needs n ≥ 2, got {n}")));
    }
    if level == 3 && n != 3 {
        return Err(Error::InvalidParams("octonionic Hermitian matrices need n = 3".into()));
    }
    let named = cd::hermitian_basis::<Rat>(n, level);
    let (labels, basis): (Vec<String>, Vec<HMatrix<Rat>>) = named.into_iter().unzip();
    let a = cd::matrix_space_algebra(&basis, |x, y| x.jordan(y))?.with_labels(labels)?;
    let inv_n = rat(1, n as i64);
    let h = BilinearForm::from_fn(basis.len(), |i, j| inv_n.clone() * basis[i].mul(&basis[j]).re_trace())?;
    let m = MetrizedAlgebra::new(a, h)?;
    let desc = descriptor("herm", &[("n", n.to_string()), ("level", level.to_string())], CATALOG[4].2);
    let mut p = plain(desc, m);
    let mut unit = HMatrix::<Rat>::zero(n, level);
    for i in 0..n {
        unit.set(i, i, linalg::basis(cd::hurwitz_dim(level), 0));
    }
    p.unit = Some(herm_coords(&unit));
    let bwu = format_rational(&rat(n as i64, 2));
    Ok(expect(p, &[("bwl", "0"), ("bwu", &bwu), ("passes", "jordan,commutative")]))
}

pub fn matrix_associative(n: usize, level: u32) -> Result<Preset> {
    if level == 3 {
        return Err(Error::InvalidParams("octonionic matrices are not associative; use level ≤ 2".into()));
    }
    let basis = cd::full_matrix_basis::<Rat>(n, level);
    let a = cd::matrix_space_algebra(&basis, |x, y| x.mul(y))?;
    let m = MetrizedAlgebra::with_form(a, BilinearForm::identity(basis.len()))?;
    let desc = descriptor("mat", &[("n", n.to_string()), ("level", level.to_string())], CATALOG[5].2);
    Ok(expect(plain(desc, m), &[("passes", "associative")]))
}

pub fn c_epsilon_algebra(eps: &Rat) -> Result<Algebra<Rat>> {
    let half = rat(1, 2);
    let a = half.clone() - eps.clone();
    let b = half + eps.clone();
    let c = vec![
        (0, 0, 0, r(1)),
        (0, 1, 1, a.clone()),
        (1, 0, 1, a.clone()),
        (0, 2, 2, b.clone()),
        (2, 0, 2, b.clone()),
        (1, 1, 0, a),
        (2, 2, 0, b),
    ];
    Algebra::new(3, c, Some(vec!["f0".into(), "f1".into(), "f2".into()]))
}

pub fn c_epsilon(eps: &Rat) -> Result<Preset> {
    let m = MetrizedAlgebra::new(c_epsilon_algebra(eps)?, BilinearForm::identity(3))?;
    let c = rat(1, 4) - eps.clone() * eps.clone();
    let p = plain(descriptor("c_epsilon", &[("epsilon", format_rational(eps))], CATALOG[6].2), m);
    Ok(expect(p, &[("constant_sect", &format_rational(&c))]))
}

pub fn e_algebra(n: usize) -> Result<Preset> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("e_algebra needs n ≥ 3, got {n}")));
    }
    let k = n as i64;
    let a_coef = rat(k + 1, k - 1);
    let b_coef = rat(-1, k - 1);
    let a = Algebra::from_products(n, |i, j| {
        let mut v = linalg::zeros::<Rat>(n);
        if i == j {
            v[i] = v[i].clone() + a_coef.clone();
        }
        v[i] = v[i].clone() + b_coef.clone();
        v[j] = v[j].clone() + b_coef.clone();
        v
    })?;
    let tau = a.killing_form();
    let m = MetrizedAlgebra::new(a, tau)?;
    let p = plain(descriptor("e_algebra", &[("n", n.to_string())], CATALOG[7].2), m);
    Ok(expect(p, &[("constant_sect", "negative"), ("exact", "true")]))
}

pub fn kosier_algebra() -> Result<Algebra<Rat>> {
    // x•y = (2x₁y₁ + x₂y₃, 2x₁y₂, 2x₃y₁)
    Algebra::new(3, vec![(0, 0, 0, r(2)), (1, 2, 0, r(1)), (0, 1, 1, r(2)), (2, 0, 2, r(2))], None)
}

fn kosier_metric() -> BilinearForm<Rat> {
    BilinearForm::new(vec![vec![r(1), r(0), r(0)], vec![r(0), r(0), rat(1, 2)], vec![r(0), rat(1, 2), r(0)]])
        .expect("symmetric")
}

pub fn kosier() -> Result<Preset> {
    let m = MetrizedAlgebra::new(kosier_algebra()?, kosier_metric())?;
    let p = plain(descriptor("kosier", &[], CATALOG[8].2), m);
    Ok(expect(p, &[("passes", "antiflexible,lie_admissible"), ("fails", "fourth_power_associative"), ("constant_sect", "0")]))
}

pub fn sl2_kosier_bracket() -> Result<Preset> {
    let b = kosier_algebra()?.derived(DerivedKind::Bracket);
    let tau = b.killing_form();
    let m = MetrizedAlgebra::new(b, tau)?;
    Ok(plain(descriptor("sl2_kosier_bracket", &[], CATALOG[9].2), m))
}

pub fn r3_star_algebra() -> Result<Algebra<Rat>> {
    Algebra::new(3, vec![(1, 2, 0, r(1)), (2, 0, 1, r(1)), (0, 1, 2, r(1))], None)
}

pub fn r3_star() -> Result<Preset> {
    let m = MetrizedAlgebra::new(r3_star_algebra()?, BilinearForm::identity(3))?;
    let p = plain(descriptor("r3_star", &[], CATALOG[10].2), m);
    Ok(expect(p, &[("constant_sect", "0"), ("symmetrized_constant_sect", "-1"), ("bracket_constant_sect", "1")]))
}

pub fn so3_killing() -> Result<Preset> {
    let cross = r3_star_algebra()?.derived(DerivedKind::Bracket);
    let h = cross.killing_form().scale(&r(-1));
    let m = MetrizedAlgebra::new(cross, h)?;
    let p = plain(descriptor("so3_killing", &[], CATALOG[11].2), m);
    // h = −B = 2·(x·y), so sect = 2|x×y|²/(4|x×y|²)
    Ok(expect(p, &[("constant_sect", "1/2")]))
}

pub fn two_step_double() -> Result<Preset> {
    // X1, X2, X3, ξ1, ξ2, ξ3 with [X1,X2] = X3, [X1,ξ3] = −ξ2, [X2,ξ3] = ξ1
    let mut c = Vec::new();
    for (i, j, k, v) in [(0, 1, 2, 1), (0, 5, 4, -1), (1, 5, 3, 1)] {
        c.push((i, j, k, r(v)));
        c.push((j, i, k, r(-v)));
    }
    let labels = ["X1", "X2", "X3", "xi1", "xi2", "xi3"].iter().map(|s| s.to_string()).collect();
    let a = Algebra::new(6, c, Some(labels))?;
    let h = BilinearForm::from_fn(6, |i, j| if i + 3 == j || j + 3 == i { r(1) } else { r(0) })?;
    let m = MetrizedAlgebra::new(a, h)?;
    let p = plain(descriptor("two_step_double", &[], CATALOG[12].2), m);
    Ok(expect(p, &[("constant_sect", "0"), ("signature", "3,3")]))
}

pub fn matrix_lie(n: usize, level: u32) -> Result<Preset> {
    if n < 1 {
        return Err(Error::InvalidParams("matrix_lie needs n ≥ 1".into()));
    }
    let basis = cd::full_matrix_basis::<Rat>(n, level);
    let a = cd::matrix_space_algebra(&basis, |x, y| x.commutator(y))?;
    let m = MetrizedAlgebra::with_form(a, BilinearForm::identity(basis.len()))?;
    let desc = descriptor("matrix_lie", &[("n", n.to_string()), ("level", level.to_string())], CATALOG[13].2);
    let bw = match level {
        0 | 1 => "2",
        2 => "4",
        _ => "unknown",
    };
    Ok(expect(plain(desc, m), &[("bw", bw)]))
}

fn complex_matrix(n: usize, entries: &[(usize, usize, i64, i64)]) -> HMatrix<Rat> {
    let mut m = HMatrix::<Rat>::zero(n, 1);
    for &(i, j, re, im) in entries {
        m.set(i, j, vec![r(re), r(im)]);
    }
    m
}

pub fn su(n: usize) -> Result<Preset> {
    if n < 2 {
        return Err(Error::InvalidParams("su needs n ≥ 2".into()));
    }
    let mut basis = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            basis.push(complex_matrix(n, &[(k, l, 1, 0), (l, k, -1, 0)]));
            basis.push(complex_matrix(n, &[(k, l, 0, 1), (l, k, 0, 1)]));
        }
    }
    for k in 0..n - 1 {
        basis.push(complex_matrix(n, &[(k, k, 0, 1), (k + 1, k + 1, 0, -1)]));
    }
    let a = cd::matrix_space_algebra(&basis, |x, y| x.commutator(y))?;
    let f = BilinearForm::from_fn(basis.len(), |i, j| basis[i].frobenius(&basis[j]))?;
    let m = MetrizedAlgebra::new(a, f)?;
    Ok(plain(descriptor("su", &[("n", n.to_string())], CATALOG[14].2), m))
}

pub fn so(n: usize) -> Result<Preset> {
    if n < 2 {
        return Err(Error::InvalidParams("so needs n ≥ 2".into()));
    }
    let mut basis = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            let mut m = HMatrix::<Rat>::zero(n, 0);
            m.set(k, l, vec![r(1)]);
            m.set(l, k, vec![r(-1)]);
            basis.push(m);
        }
    }
    let a = cd::matrix_space_algebra(&basis, |x, y| x.commutator(y))?;
    let f = BilinearForm::from_fn(basis.len(), |i, j| basis[i].frobenius(&basis[j]))?;
    let m = MetrizedAlgebra::new(a, f)?;
    let p = plain(descriptor("so", &[("n", n.to_string())], CATALOG[15].2), m);
    Ok(expect(p, &[("bw", match n { 2 => "0", 3 => "1/2", _ => "1" })]))
}

type CMat = [[Complex64; 3]; 3];

fn cmul(a: &CMat, b: &CMat) -> CMat {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            for j in 0..3 {
                out[i][k] += a[i][j] * b[j][k];
            }
        }
    }
    out
}

fn ctrace(a: &CMat) -> Complex64 {
    a[0][0] + a[1][1] + a[2][2]
}

/// `i λ_a` for the Gell-Mann matrices `λ_1..λ_8`.
fn su3_basis() -> Vec<CMat> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let s3 = 1.0 / 3f64.sqrt();
    let mut lam = vec![[[z; 3]; 3]; 8];
    lam[0][0][1] = one;
    lam[0][1][0] = one;
    lam[1][0][1] = -i;
    lam[1][1][0] = i;
    lam[2][0][0] = one;
    lam[2][1][1] = -one;
    lam[3][0][2] = one;
    lam[3][2][0] = one;
    lam[4][0][2] = -i;
    lam[4][2][0] = i;
    lam[5][1][2] = one;
    lam[5][2][1] = one;
    lam[6][1][2] = -i;
    lam[6][2][1] = i;
    lam[7][0][0] = one * s3;
    lam[7][1][1] = one * s3;
    lam[7][2][2] = -2.0 * one * s3;
    lam.into_iter().map(|m| m.map(|row| row.map(|c| c * i))).collect()
}

/// Imaginary residue above which the compact Okubo construction is rejected.
const OKUBO_CLOSURE_TOL: f64 = 1e-9;

/// Compact Okubo algebra: `x⋆y = ωxy − ω²yx + (ω−ω²)/3 h(x,y) I` on su(3), `h(x,y) = −tr(xy)`.
pub fn okubo_compact() -> Result<Preset> {
    let basis = su3_basis();
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let w2 = w * w;
    let h = |x: &CMat, y: &CMat| -ctrace(&cmul(x, y));
    let mut worst: f64 = 0.0;
    let mut table = Vec::with_capacity(64);
    for x in &basis {
        for y in &basis {
            let xy = cmul(x, y);
            let yx = cmul(y, x);
            let hxy = h(x, y);
            let mut p = [[Complex64::new(0.0, 0.0); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    p[i][j] = w * xy[i][j] - w2 * yx[i][j];
                }
                p[i][i] += (w - w2) / 3.0 * hxy;
            }
            // coordinates via h(b_a, b_b) = 2δ_ab
            let coords: Vec<f64> = basis
                .iter()
                .map(|b| {
                    let c = h(b, &p) / 2.0;
                    worst = worst.max(c.im.abs());
                    c.re
                })
                .collect();
            let mut back = [[Complex64::new(0.0, 0.0); 3]; 3];
            for (b, c) in basis.iter().zip(&coords) {
                for i in 0..3 {
                    for j in 0..3 {
                        back[i][j] += b[i][j] * *c;
                    }
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((back[i][j] - p[i][j]).norm());
                }
            }
            table.push(coords.into_iter().map(|c| if c.abs() < 1e-15 { 0.0 } else { c }).collect::<Vec<_>>());
        }
    }
    if worst > OKUBO_CLOSURE_TOL {
        return Err(Error::Construction(format!("Okubo product leaves su(3): residue {worst:e}")));
    }
    let a = Algebra::from_products(8, |i, j| table[i * 8 + j].clone())?;
    let m = MetrizedAlgebra::new(a, BilinearForm::identity(8).scale(&2.0))?;
    let mut desc = descriptor("okubo_compact", &[], CATALOG[16].2);
    desc.expected.insert("bwl".into(), "-1".into());
    desc.expected.insert("bwu".into(), "1".into());
    desc.expected.insert("closure_residue".into(), format!("{worst:e}"));
    Ok(Preset { descriptor: desc, metrized: AnyMetrized::Float(m), unit: None, conjugation: None, norm: None, metric_invariant: true })
}

/// The su(3) commutator in the basis of `okubo_compact`.
pub fn su3_commutator_f64() -> Algebra<f64> {
    let basis = su3_basis();
    let h = |x: &CMat, y: &CMat| -ctrace(&cmul(x, y));
    Algebra::from_products(8, |i, j| {
        let xy = cmul(&basis[i], &basis[j]);
        let yx = cmul(&basis[j], &basis[i]);
        let mut c = [[Complex64::new(0.0, 0.0); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                c[a][b] = xy[a][b] - yx[a][b];
            }
        }
        basis.iter().map(|b| (h(b, &c) / 2.0).re).collect()
    })
    .expect("su(3) closes")
}

/// Linearized composition law `h(x•y, w•z) + h(w•y, x•z) = h(x,w) h(y,z)` on all basis
/// 4-tuples; with `check_invariance` the invariance defect of `h` is folded in.
pub fn composition_check<T: Scalar>(a: &Algebra<T>, h: &BilinearForm<T>, check_invariance: bool) -> DefectReport {
    let n = a.dim();
    let prods: Vec<Vec<T>> = (0..n * n).map(|t| a.basis_product_dense(t / n, t % n)).collect();
    let lowered: Vec<Vec<T>> = prods.iter().map(|v| h.lower(v)).collect();
    let hp = |i: usize, j: usize, k: usize, l: usize| linalg::dot(&prods[i * n + j], &lowered[k * n + l]);
    let scan = scan_tuples(n, 4, |_| true, |t| {
        let (x, y, w, z) = (t[0], t[1], t[2], t[3]);
        (hp(x, y, w, z) + hp(w, y, x, z) - h.get(x, w).clone() * h.get(y, z).clone()).abs()
    });
    let mut report = DefectReport::from_scan("composition", scan);
    if check_invariance {
        let inv = crate::algebra::check_metric(a, h).expect("dims match");
        if inv.max_defect > report.max_defect {
            report.max_defect = inv.max_defect;
            report.exact_defect = inv.max_defect.to_string();
            report.witness = inv.witness.map(|(i, j, k)| vec![i, j, k]);
        }
        report.identity = "symmetric_composition".into();
        report.passed = report.passed && inv.invariant;
    }
    report
}

/// Symmetry imposed on the trilinear form of a random metrized algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    /// cyclic only
    General,
    /// fully symmetric: commutative
    Commutative,
    /// fully antisymmetric: anticommutative
    Anticommutative,
}

/// A random rational metrized algebra. A cyclic trilinear form `τ` with small integer
/// entries and a diagonal metric `h` define `x•y` by `h(x•y, z) = τ(x, y, z)`, which
/// makes `h` invariant by construction.
pub fn random_metrized(seed: u64, dim: usize, kind: RandomKind) -> Result<MetrizedAlgebra<Rat>> {
    use rand::Rng;
    if dim == 0 {
        return Err(Error::EmptyAlgebra);
    }
    let mut rng = crate::optimize::stream_rng(seed, 1 << 52);
    let n = dim;
    let mut t = vec![0i64; n * n * n];
    for v in t.iter_mut() {
        // sparse small entries keep the exact arithmetic cheap
        *v = if rng.random_bool(0.5) { rng.random_range(-2..=2) } else { 0 };
    }
    let at = |i: usize, j: usize, k: usize| t[(i * n + j) * n + k];
    let tau = |i: usize, j: usize, k: usize| -> i64 {
        let cyc = at(i, j, k) + at(j, k, i) + at(k, i, j);
        let rev = at(j, i, k) + at(i, k, j) + at(k, j, i);
        match kind {
            RandomKind::General => cyc,
            RandomKind::Commutative => cyc + rev,
            RandomKind::Anticommutative => cyc - rev,
        }
    };
    let diag: Vec<Rat> = (0..n).map(|_| rat(rng.random_range(1..=3), rng.random_range(1..=2))).collect();
    let mut constants = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = tau(i, j, k);
                if v != 0 {
                    constants.push((i, j, k, rat(v, 1) / diag[k].clone()));
                }
            }
        }
    }
    MetrizedAlgebra::new(Algebra::new(n, constants, None)?, BilinearForm::diagonal(&diag))
}
