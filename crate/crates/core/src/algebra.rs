//! Structure-constant algebras and their invariant metrics.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, BilinearForm, Definiteness, Element, Inertia, LinearMap};
use crate::scalar::{NumericMode, Rat, Scalar};

/// Sparse row: `(k, c)` pairs with `c != 0`, sorted by `k`.
pub type SparseVec<T> = Vec<(usize, T)>;

/// A finite-dimensional algebra given by `e_i • e_j = Σ_k c_ij^k e_k`.
#[derive(Debug)]
pub struct Algebra<T> {
    dim: usize,
    constants: Vec<(usize, usize, usize, T)>,
    labels: Option<Vec<String>>,
    table: OnceLock<Vec<SparseVec<T>>>,
}

impl<T: Scalar> Clone for Algebra<T> {
    fn clone(&self) -> Self {
        Algebra {
            dim: self.dim,
            constants: self.constants.clone(),
            labels: self.labels.clone(),
            table: OnceLock::new(),
        }
    }
}

impl<T: Scalar> PartialEq for Algebra<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.constants == other.constants && self.labels == other.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedKind {
    /// `[x, y] = x•y − y•x`
    Bracket,
    /// `x∘y = x•y + y•x`
    Symmetrized,
    /// `x•̄y = −y•x`
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComposeKind {
    DirectSum,
    TensorProduct,
}

impl<T: Scalar> Algebra<T> {
    /// Validates indices and duplicates; zero coefficients are dropped.
    pub fn new(dim: usize, constants: Vec<(usize, usize, usize, T)>, labels: Option<Vec<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyAlgebra);
        }
        if let Some(l) = &labels {
            check_dim(dim, l.len())?;
        }
        let mut seen = BTreeMap::new();
        for (i, j, k, c) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::IndexOutOfRange { i, j, k, dim });
            }
            if seen.insert((i, j, k), c).is_some() {
                return Err(Error::DuplicateConstant { i, j, k });
            }
        }
        let constants = seen
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j, k), c)| (i, j, k, c))
            .collect();
        Ok(Algebra { dim, constants, labels, table: OnceLock::new() })
    }

    /// Builds the algebra from the basis products `f(i, j) = e_i • e_j`.
    pub fn from_products(dim: usize, mut f: impl FnMut(usize, usize) -> Vec<T>) -> Result<Self> {
        let mut constants = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = f(i, j);
                check_dim(dim, v.len())?;
                for (k, c) in v.into_iter().enumerate() {
                    if !c.is_zero() {
                        constants.push((i, j, k, c));
                    }
                }
            }
        }
        Self::new(dim, constants, None)
    }

    pub fn zero_product(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), None)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        check_dim(self.dim, labels.len())?;
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> NumericMode {
        T::MODE
    }

    pub fn constants(&self) -> &[(usize, usize, usize, T)] {
        &self.constants
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn table(&self) -> &[SparseVec<T>] {
        self.table.get_or_init(|| {
            let n = self.dim;
            let mut t = vec![Vec::new(); n * n];
            for (i, j, k, c) in &self.constants {
                t[i * n + j].push((*k, c.clone()));
            }
            t
        })
    }

    /// `e_i • e_j` as a sparse vector.
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, T)] {
        &self.table()[i * self.dim + j]
    }

    pub fn basis_product_dense(&self, i: usize, j: usize) -> Vec<T> {
        let mut v = linalg::zeros(self.dim);
        for (k, c) in self.basis_product(i, j) {
            v[*k] = c.clone();
        }
        v
    }

    /// Unchecked product; callers guarantee matching lengths.
    pub fn mul(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim;
        let table = self.table();
        let mut out: Vec<T> = linalg::zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let row = &table[i * n + j];
                if row.is_empty() {
                    continue;
                }
                let s = xi.clone() * yj.clone();
                for (k, c) in row {
                    out[*k] = out[*k].clone() + s.clone() * c.clone();
                }
            }
        }
        out
    }

    pub fn multiply(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.mul(x, y))
    }

    /// `L(x)`
    pub fn left_op(&self, x: &[T]) -> LinearMap<T> {
        let n = self.dim;
        let mut m: LinearMap<T> = LinearMap::zero(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, c) in self.basis_product(i, j) {
                    let v = m.get(*k, j).clone() + xi.clone() * c.clone();
                    m.set(*k, j, v);
                }
            }
        }
        m
    }

    /// `R(x)`
    pub fn right_op(&self, x: &[T]) -> LinearMap<T> {
        let n = self.dim;
        let mut m: LinearMap<T> = LinearMap::zero(n);
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for i in 0..n {
                for (k, c) in self.basis_product(i, j) {
                    let v = m.get(*k, i).clone() + xj.clone() * c.clone();
                    m.set(*k, i, v);
                }
            }
        }
        m
    }

    pub fn mult_operators(&self, x: &[T]) -> Result<(LinearMap<T>, LinearMap<T>)> {
        check_dim(self.dim, x.len())?;
        Ok((self.left_op(x), self.right_op(x)))
    }

    /// `L(x)ᵀ v` in one pass over the constants.
    pub fn left_op_t_apply(&self, x: &[T], v: &[T]) -> Vec<T> {
        let mut out: Vec<T> = linalg::zeros(self.dim);
        for (i, j, k, c) in &self.constants {
            if x[*i].is_zero() || v[*k].is_zero() {
                continue;
            }
            out[*j] = out[*j].clone() + x[*i].clone() * c.clone() * v[*k].clone();
        }
        out
    }

    /// `R(y)ᵀ v` in one pass over the constants.
    pub fn right_op_t_apply(&self, y: &[T], v: &[T]) -> Vec<T> {
        let mut out: Vec<T> = linalg::zeros(self.dim);
        for (i, j, k, c) in &self.constants {
            if y[*j].is_zero() || v[*k].is_zero() {
                continue;
            }
            out[*i] = out[*i].clone() + y[*j].clone() * c.clone() * v[*k].clone();
        }
        out
    }

    /// `(x•y)•z − x•(y•z)`
    pub fn assoc(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
        linalg::sub(&self.mul(&self.mul(x, y), z), &self.mul(x, &self.mul(y, z)))
    }

    pub fn associator(&self, x: &[T], y: &[T], z: &[T]) -> Result<Vec<T>> {
        for v in [x, y, z] {
            check_dim(self.dim, v.len())?;
        }
        Ok(self.assoc(x, y, z))
    }

    pub fn bracket(&self, x: &[T], y: &[T]) -> Vec<T> {
        linalg::sub(&self.mul(x, y), &self.mul(y, x))
    }

    /// Associator of basis elements as a sparse vector.
    pub fn basis_assoc(&self, i: usize, j: usize, k: usize) -> Vec<T> {
        let n = self.dim;
        let mut out: Vec<T> = linalg::zeros(n);
        for (m, c) in self.basis_product(i, j) {
            for (r, d) in self.basis_product(*m, k) {
                out[*r] = out[*r].clone() + c.clone() * d.clone();
            }
        }
        for (m, c) in self.basis_product(j, k) {
            for (r, d) in self.basis_product(i, *m) {
                out[*r] = out[*r].clone() - c.clone() * d.clone();
            }
        }
        out
    }

    pub fn derived(&self, kind: DerivedKind) -> Algebra<T> {
        let mut acc: BTreeMap<(usize, usize, usize), T> = BTreeMap::new();
        let mut push = |key, c: T| {
            let e = acc.entry(key).or_insert_with(T::zero);
            *e = e.clone() + c;
        };
        for (i, j, k, c) in &self.constants {
            match kind {
                DerivedKind::Bracket => {
                    push((*i, *j, *k), c.clone());
                    push((*j, *i, *k), -c.clone());
                }
                DerivedKind::Symmetrized => {
                    push((*i, *j, *k), c.clone());
                    push((*j, *i, *k), c.clone());
                }
                DerivedKind::Adjoint => push((*j, *i, *k), -c.clone()),
            }
        }
        let constants = acc.into_iter().map(|((i, j, k), c)| (i, j, k, c)).collect();
        Algebra::new(self.dim, constants, self.labels.clone()).expect("derived constants stay in range")
    }

    /// The product `s · (x•y)`.
    pub fn scaled(&self, s: &T) -> Algebra<T> {
        let constants = self.constants.iter().map(|(i, j, k, c)| (*i, *j, *k, s.clone() * c.clone())).collect();
        Algebra::new(self.dim, constants, self.labels.clone()).expect("scaling keeps indices")
    }

    pub fn direct_sum(&self, other: &Algebra<T>) -> Algebra<T> {
        let n = self.dim;
        let mut constants = self.constants.clone();
        constants.extend(other.constants.iter().map(|(i, j, k, c)| (i + n, j + n, k + n, c.clone())));
        Algebra::new(n + other.dim, constants, None).expect("block constants stay in range")
    }

    /// `(a₁⊗b₁)•(a₂⊗b₂) = (a₁•a₂)⊗(b₁•b₂)` on the basis `e_i ⊗ f_a ↦ i * dim(B) + a`.
    pub fn tensor(&self, other: &Algebra<T>) -> Algebra<T> {
        let m = other.dim;
        let mut constants = Vec::new();
        for (i, j, k, c) in &self.constants {
            for (a, b, d, e) in &other.constants {
                constants.push((i * m + a, j * m + b, k * m + d, c.clone() * e.clone()));
            }
        }
        Algebra::new(self.dim * m, constants, None).expect("tensor constants are unique")
    }

    /// `τ(e_i, e_j) = tr L(e_i) L(e_j)`.
    pub fn killing_form(&self) -> BilinearForm<T> {
        let n = self.dim;
        let ls: Vec<LinearMap<T>> = (0..n).map(|i| self.left_op(&linalg::basis(n, i))).collect();
        BilinearForm::from_fn(n, |i, j| {
            let mut s = T::zero();
            for a in 0..n {
                for b in 0..n {
                    let u = ls[i].get(a, b);
                    if !u.is_zero() {
                        s = s + u.clone() * ls[j].get(b, a).clone();
                    }
                }
            }
            s
        })
        .expect("trace form is symmetric")
    }

    pub fn is_commutative(&self) -> bool {
        self.derived(DerivedKind::Bracket).constants.iter().all(|c| c.3.negligible())
    }

    pub fn is_anticommutative(&self) -> bool {
        self.derived(DerivedKind::Symmetrized).constants.iter().all(|c| c.3.negligible())
    }

    pub fn to_f64(&self) -> Algebra<f64> {
        let constants = self.constants.iter().map(|(i, j, k, c)| (*i, *j, *k, c.to_f64())).collect();
        Algebra::new(self.dim, constants, self.labels.clone()).expect("conversion keeps indices")
    }
}

/// Result of checking `h` against a product.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub invariant: bool,
    pub max_defect: f64,
    pub witness: Option<(usize, usize, usize)>,
    pub nondegenerate: bool,
    pub inertia: Inertia,
    pub definiteness: Definiteness,
}

/// Checks `h(e_i•e_j, e_k) = h(e_i, e_j•e_k)` on all basis triples, nondegeneracy and signature.
pub fn check_metric<T: Scalar>(a: &Algebra<T>, h: &BilinearForm<T>) -> Result<MetricReport> {
    check_dim(a.dim(), h.dim())?;
    let (max, witness) = invariance_defect(a, h);
    let inertia = h.inertia();
    Ok(MetricReport {
        invariant: max.negligible(),
        max_defect: max.to_f64(),
        witness: if max.is_zero() { None } else { witness },
        nondegenerate: h.is_nondegenerate(),
        inertia,
        definiteness: inertia.definiteness(),
    })
}

fn invariance_defect<T: Scalar>(a: &Algebra<T>, h: &BilinearForm<T>) -> (T, Option<(usize, usize, usize)>) {
    let n = a.dim();
    // μ(i,j,k) = h(e_i•e_j, e_k)
    let mu = |i: usize, j: usize, k: usize| -> T {
        let mut s = T::zero();
        for (m, c) in a.basis_product(i, j) {
            let g = h.get(*m, k);
            if !g.is_zero() {
                s = s + c.clone() * g.clone();
            }
        }
        s
    };
    let rows: Vec<(T, Option<(usize, usize, usize)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = T::zero();
            let mut wit = None;
            for j in 0..n {
                for k in 0..n {
                    // h(e_i, e_j•e_k) = μ(j,k,i) by symmetry of h
                    let d = (mu(i, j, k) - mu(j, k, i)).abs();
                    if d > best {
                        best = d;
                        wit = Some((i, j, k));
                    }
                }
            }
            (best, wit)
        })
        .collect();
    let mut best = T::zero();
    let mut wit = None;
    for (d, w) in rows {
        if d > best {
            best = d;
            wit = w;
        }
    }
    (best, wit)
}

/// An algebra paired with a nondegenerate symmetric form.
#[derive(Debug, Clone)]
pub struct MetrizedAlgebra<T: Scalar> {
    algebra: Algebra<T>,
    form: BilinearForm<T>,
    form_inverse: LinearMap<T>,
    report: MetricReport,
}

impl<T: Scalar> MetrizedAlgebra<T> {
    /// Requires an invariant, nondegenerate form.
    pub fn new(algebra: Algebra<T>, form: BilinearForm<T>) -> Result<Self> {
        let m = Self::with_form(algebra, form)?;
        if !m.report.invariant {
            return Err(Error::NotInvariant {
                defect: m.report.max_defect,
                witness: m.report.witness.unwrap_or((0, 0, 0)),
            });
        }
        Ok(m)
    }

    /// Accepts a non-invariant form; the certificate records the failure.
    pub fn with_form(algebra: Algebra<T>, form: BilinearForm<T>) -> Result<Self> {
        let report = check_metric(&algebra, &form)?;
        if !report.nondegenerate {
            return Err(Error::Degenerate);
        }
        let form_inverse = linalg::inverse(&form.as_map())?;
        Ok(MetrizedAlgebra { algebra, form, form_inverse, report })
    }

    pub fn algebra(&self) -> &Algebra<T> {
        &self.algebra
    }

    pub fn form(&self) -> &BilinearForm<T> {
        &self.form
    }

    pub fn form_inverse(&self) -> &LinearMap<T> {
        &self.form_inverse
    }

    pub fn report(&self) -> &MetricReport {
        &self.report
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn is_invariant(&self) -> bool {
        self.report.invariant
    }

    pub fn is_euclidean(&self) -> bool {
        self.report.definiteness == Definiteness::PositiveDefinite
    }

    pub fn h(&self, x: &[T], y: &[T]) -> T {
        self.form.eval(x, y)
    }

    pub fn mul(&self, x: &[T], y: &[T]) -> Vec<T> {
        self.algebra.mul(x, y)
    }

    /// The same metric with a derived product.
    pub fn derived(&self, kind: DerivedKind) -> Result<Self> {
        Self::with_form(self.algebra.derived(kind), self.form.clone())
    }

    pub fn to_f64(&self) -> MetrizedAlgebra<f64> {
        MetrizedAlgebra {
            algebra: self.algebra.to_f64(),
            form: self.form.to_f64(),
            form_inverse: self.form_inverse.to_f64(),
            report: self.report.clone(),
        }
    }
}

/// Direct sum (block product, block-diagonal metric) or tensor product (`h ⊗ k`).
pub fn compose<T: Scalar>(kind: ComposeKind, a: &MetrizedAlgebra<T>, b: &MetrizedAlgebra<T>) -> Result<MetrizedAlgebra<T>> {
    let (alg, form) = match kind {
        ComposeKind::DirectSum => (a.algebra.direct_sum(&b.algebra), a.form.block_diag(&b.form)),
        ComposeKind::TensorProduct => (a.algebra.tensor(&b.algebra), a.form.kron(&b.form)),
    };
    if a.is_invariant() && b.is_invariant() {
        MetrizedAlgebra::new(alg, form)
    } else {
        MetrizedAlgebra::with_form(alg, form)
    }
}

/// Tensor of two elements in the `i * dim(B) + a` ordering.
pub fn tensor_element<T: Scalar>(x: &[T], y: &[T]) -> Element<T> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a.clone() * b.clone());
        }
    }
    out
}

/// Either numeric mode behind one type.
#[derive(Debug, Clone)]
pub enum AnyMetrized {
    Rational(MetrizedAlgebra<Rat>),
    Float(MetrizedAlgebra<f64>),
}

impl AnyMetrized {
    pub fn dim(&self) -> usize {
        match self {
            AnyMetrized::Rational(m) => m.dim(),
            AnyMetrized::Float(m) => m.dim(),
        }
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            AnyMetrized::Rational(_) => NumericMode::Rational,
            AnyMetrized::Float(_) => NumericMode::Float,
        }
    }

    pub fn to_f64(&self) -> MetrizedAlgebra<f64> {
        match self {
            AnyMetrized::Rational(m) => m.to_f64(),
            AnyMetrized::Float(m) => m.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<&MetrizedAlgebra<Rat>> {
        match self {
            AnyMetrized::Rational(m) => Some(m),
            AnyMetrized::Float(_) => None,
        }
    }

    pub fn report(&self) -> &MetricReport {
        match self {
            AnyMetrized::Rational(m) => m.report(),
            AnyMetrized::Float(m) => m.report(),
        }
    }
}

pub fn compose_any(kind: ComposeKind, a: &AnyMetrized, b: &AnyMetrized) -> Result<AnyMetrized> {
    match (a, b) {
        (AnyMetrized::Rational(x), AnyMetrized::Rational(y)) => Ok(AnyMetrized::Rational(compose(kind, x, y)?)),
        (AnyMetrized::Float(x), AnyMetrized::Float(y)) => Ok(AnyMetrized::Float(compose(kind, x, y)?)),
        _ => Err(Error::ModeMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use crate::scalar::rat;

    fn r(v: i64) -> Rat {
        rat(v, 1)
    }

    /// ℝ³ with x⋆y = (x₂y₃, x₃y₁, x₁y₂)
    fn star() -> Algebra<Rat> {
        Algebra::new(3, vec![(1, 2, 0, r(1)), (2, 0, 1, r(1)), (0, 1, 2, r(1))], None).unwrap()
    }

    #[test]
    fn star_product_and_bracket() {
        let a = star();
        let e = |i| linalg::basis::<Rat>(3, i);
        assert_eq!(a.multiply(&e(1), &e(2)).unwrap(), e(0));
        assert_eq!(a.multiply(&e(2), &e(1)).unwrap(), linalg::zeros::<Rat>(3));
        let b = a.derived(DerivedKind::Bracket);
        // cross product: e1×e2 = e3, e2×e1 = −e3
        assert_eq!(b.mul(&e(0), &e(1)), e(2));
        assert_eq!(b.mul(&e(1), &e(0)), linalg::scale(&r(-1), &e(2)));
    }

    #[test]
    fn operators_match_products() {
        let a = star();
        let x = vec![r(2), r(-1), rat(1, 3)];
        let y = vec![r(1), r(4), r(-2)];
        let (l, rr) = a.mult_operators(&x).unwrap();
        assert_eq!(l.apply(&y), a.mul(&x, &y));
        assert_eq!(rr.apply(&y), a.mul(&y, &x));
        let v = vec![r(3), r(0), r(5)];
        assert_eq!(a.left_op_t_apply(&x, &v), l.transpose().apply(&v));
        assert_eq!(a.right_op_t_apply(&x, &v), rr.transpose().apply(&v));
    }

    #[test]
    fn zero_element_gives_zero_maps() {
        let a = star();
        let (l, rr) = a.mult_operators(&linalg::zeros(3)).unwrap();
        assert!(l.is_zero() && rr.is_zero());
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(matches!(Algebra::new(2, vec![(0, 0, 2, r(1))], None), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            Algebra::new(2, vec![(0, 0, 1, r(1)), (0, 0, 1, r(2))], None),
            Err(Error::DuplicateConstant { .. })
        ));
        assert!(matches!(Algebra::<Rat>::new(0, vec![], None), Err(Error::EmptyAlgebra)));
        assert!(matches!(star().multiply(&[r(1)], &[r(1), r(1), r(1)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_of_anticommutative_is_itself() {
        let b = star().derived(DerivedKind::Bracket);
        assert_eq!(b.derived(DerivedKind::Adjoint), b);
    }

    #[test]
    fn symmetrized_of_commutative_doubles() {
        let s = star().derived(DerivedKind::Symmetrized);
        assert_eq!(s.derived(DerivedKind::Symmetrized), s.scaled(&r(2)));
    }

    #[test]
    fn star_metric_is_invariant() {
        let rep = check_metric(&star(), &BilinearForm::identity(3)).unwrap();
        assert!(rep.invariant && rep.nondegenerate);
        assert_eq!(rep.definiteness, Definiteness::PositiveDefinite);
    }

    #[test]
    fn zero_product_has_zero_killing_form() {
        let a = Algebra::<Rat>::zero_product(4).unwrap();
        assert!(a.killing_form().rows().iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn direct_sum_and_tensor_dims() {
        let m = MetrizedAlgebra::new(star(), BilinearForm::identity(3)).unwrap();
        let s = compose(ComposeKind::DirectSum, &m, &m).unwrap();
        assert_eq!(s.dim(), 6);
        assert!(s.is_invariant());
        let t = compose(ComposeKind::TensorProduct, &m, &m).unwrap();
        assert_eq!(t.dim(), 9);
        let x = vec![r(1), r(2), r(0)];
        let y = vec![r(0), r(1), r(3)];
        let xy = tensor_element(&x, &y);
        assert_eq!(t.h(&xy, &xy), m.h(&x, &x) * m.h(&y, &y));
        assert_eq!(t.mul(&xy, &xy), tensor_element(&m.mul(&x, &x), &m.mul(&y, &y)));
    }

    #[test]
    fn compose_rejects_mixed_modes() {
        let m = MetrizedAlgebra::new(star(), BilinearForm::identity(3)).unwrap();
        let a = AnyMetrized::Rational(m.clone());
        let b = AnyMetrized::Float(m.to_f64());
        assert!(matches!(compose_any(ComposeKind::DirectSum, &a, &b), Err(Error::ModeMismatch)));
    }
}
