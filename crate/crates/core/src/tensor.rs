//! Dense rank-4 tensors, the Kulkarni product and the curvature-type projections.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, MetrizedAlgebra, SparseVec};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{BilinearForm, LinearMap};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    None,
    /// `a(x,y,z,w) = −a(y,x,z,w) = −a(x,y,w,z) = a(z,w,x,y)`
    S2Lambda2,
    /// `S2Lambda2` plus the cyclic first-Bianchi sum.
    CurvatureType,
    FullyAntisymmetric,
}

impl SymmetryClass {
    fn name(self) -> &'static str {
        match self {
            SymmetryClass::None => "none",
            SymmetryClass::S2Lambda2 => "s2_lambda2",
            SymmetryClass::CurvatureType => "curvature_type",
            SymmetryClass::FullyAntisymmetric => "fully_antisymmetric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rank4Tensor<T> {
    n: usize,
    data: Vec<T>,
    class: SymmetryClass,
}

impl<T: Scalar> Rank4Tensor<T> {
    pub fn zeros(n: usize) -> Self {
        Rank4Tensor { n, data: vec![T::zero(); n * n * n * n], class: SymmetryClass::None }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> T + Sync) -> Self {
        let data = (0..n * n)
            .into_par_iter()
            .flat_map_iter(|ij| {
                let (i, j) = (ij / n, ij % n);
                let f = &f;
                (0..n * n).map(move |kl| f(i, j, kl / n, kl % n))
            })
            .collect();
        Rank4Tensor { n, data, class: SymmetryClass::None }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &T {
        &self.data[self.idx(i, j, k, l)]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Multilinear evaluation on four vectors.
    pub fn eval(&self, x: &[T], y: &[T], z: &[T], w: &[T]) -> T {
        let n = self.n;
        let mut s = T::zero();
        for i in (0..n).filter(|&i| !x[i].is_zero()) {
            for j in (0..n).filter(|&j| !y[j].is_zero()) {
                let xy = x[i].clone() * y[j].clone();
                for k in (0..n).filter(|&k| !z[k].is_zero()) {
                    let xyz = xy.clone() * z[k].clone();
                    for l in (0..n).filter(|&l| !w[l].is_zero()) {
                        let t = self.get(i, j, k, l);
                        if !t.is_zero() {
                            s = s + xyz.clone() * w[l].clone() * t.clone();
                        }
                    }
                }
            }
        }
        s
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| {
            let a = v.abs();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs().negligible()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Rank4Tensor { n: self.n, data: self.data.iter().map(|v| s.clone() * v.clone()).collect(), class: self.class }
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        let class = if self.class == other.class { self.class } else { SymmetryClass::None };
        Rank4Tensor { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(), class }
    }

    /// Largest violation of the symmetries defining `class`.
    pub fn symmetry_defect(&self, class: SymmetryClass) -> T {
        let n = self.n;
        let t = |i, j, k, l| self.get(i, j, k, l).clone();
        let mut worst = T::zero();
        let mut bump = |v: T| {
            let a = v.abs();
            if a > worst {
                worst = a;
            }
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let a = t(i, j, k, l);
                        match class {
                            SymmetryClass::None => {}
                            SymmetryClass::S2Lambda2 | SymmetryClass::CurvatureType => {
                                bump(a.clone() + t(j, i, k, l));
                                bump(a.clone() + t(i, j, l, k));
                                bump(a.clone() - t(k, l, i, j));
                                if class == SymmetryClass::CurvatureType {
                                    bump(a + t(j, k, i, l) + t(k, i, j, l));
                                }
                            }
                            SymmetryClass::FullyAntisymmetric => {
                                bump(a.clone() + t(j, i, k, l));
                                bump(a.clone() + t(i, k, j, l));
                                bump(a + t(i, j, l, k));
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Checks `class` entrywise and records it on success.
    pub fn with_class(mut self, class: SymmetryClass) -> Result<Self> {
        let d = self.symmetry_defect(class);
        if !d.negligible() {
            return Err(Error::Symmetry { class: class.name(), defect: d.to_f64() });
        }
        self.class = class;
        Ok(self)
    }

    fn unchecked(mut self, class: SymmetryClass) -> Self {
        self.class = class;
        self
    }
}

/// `(h∧h)(x,y,z,w) = h(x,z)h(y,w) − h(x,w)h(y,z)`
pub fn kulkarni<T: Scalar>(h: &BilinearForm<T>) -> Rank4Tensor<T> {
    Rank4Tensor::from_fn(h.dim(), |i, j, k, l| {
        h.get(i, k).clone() * h.get(j, l).clone() - h.get(i, l).clone() * h.get(j, k).clone()
    })
    .unchecked(SymmetryClass::CurvatureType)
}

/// Orthogonal projections `(P(T), Q(T))` of an `S²Λ²` tensor onto curvature-type and
/// fully antisymmetric tensors.
pub fn project_curvature<T: Scalar>(t: &Rank4Tensor<T>) -> Result<(Rank4Tensor<T>, Rank4Tensor<T>)> {
    if !matches!(t.class(), SymmetryClass::S2Lambda2 | SymmetryClass::CurvatureType) {
        return Err(Error::Symmetry { class: "s2_lambda2", defect: f64::NAN });
    }
    let third = T::from_ratio(1, 3);
    let two = T::from_i64(2);
    let n = t.dim();
    let p = Rank4Tensor::from_fn(n, |i, j, k, l| {
        third.clone() * (two.clone() * t.get(i, j, k, l).clone() - t.get(j, k, i, l).clone() - t.get(k, i, j, l).clone())
    });
    let q = Rank4Tensor::from_fn(n, |i, j, k, l| {
        third.clone() * (t.get(i, j, k, l).clone() + t.get(j, k, i, l).clone() + t.get(k, i, j, l).clone())
    });
    Ok((p.unchecked(SymmetryClass::CurvatureType), q.unchecked(SymmetryClass::FullyAntisymmetric)))
}

/// Complete contraction `⟨a, b⟩` using the inverse metric on every index.
pub fn pairing<T: Scalar>(a: &Rank4Tensor<T>, b: &Rank4Tensor<T>, h_inv: &LinearMap<T>) -> Result<T> {
    let n = a.dim();
    check_dim(n, b.dim())?;
    check_dim(n, h_inv.dim())?;
    // raise one index at a time: b^{..} with four passes
    let mut raised = b.data.clone();
    for slot in 0..4 {
        let stride = n.pow(3 - slot as u32);
        let mut next = vec![T::zero(); raised.len()];
        for (pos, out) in next.iter_mut().enumerate() {
            let idx = (pos / stride) % n;
            let base = pos - idx * stride;
            let mut s = T::zero();
            for m in 0..n {
                let g = h_inv.get(idx, m);
                if !g.is_zero() {
                    s = s + g.clone() * raised[base + m * stride].clone();
                }
            }
            *out = s;
        }
        raised = next;
    }
    Ok(a.data.iter().zip(&raised).fold(T::zero(), |s, (u, v)| s + u.clone() * v.clone()))
}

/// All basis associators `[e_i, e_j, e_k]`, sparse, indexed `(i*n + j)*n + k`.
pub fn associator_table<T: Scalar>(a: &Algebra<T>) -> Vec<SparseVec<T>> {
    let n = a.dim();
    (0..n * n * n)
        .into_par_iter()
        .map(|t| {
            let v = a.basis_assoc(t / (n * n), (t / n) % n, t % n);
            v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
        })
        .collect()
}

/// `(ℛ♭ + ℛ̄♭)(x,y,z,w) = h(ℛ(x,y)z + ℛ̄(x,y)z, w)`, built from associators so that it is
/// defined for any metric; validated as `S²Λ²`.
pub fn curvature_flat<T: Scalar>(m: &MetrizedAlgebra<T>) -> Result<Rank4Tensor<T>> {
    let a = m.algebra();
    let h = m.form();
    let n = a.dim();
    let table = associator_table(a);
    let at = |i: usize, j: usize, k: usize| &table[(i * n + j) * n + k];
    let t = Rank4Tensor::from_fn(n, |i, j, k, l| {
        // ℛ(x,y)z = −[x,y,z] + [y,x,z],  ℛ̄(x,y)z = −[z,x,y] + [z,y,x]
        let mut s = T::zero();
        for (sign, v) in [(-1, at(i, j, k)), (1, at(j, i, k)), (-1, at(k, i, j)), (1, at(k, j, i))] {
            for (r, c) in v {
                let g = h.get(*r, l);
                if !g.is_zero() {
                    let term = c.clone() * g.clone();
                    s = if sign > 0 { s + term } else { s - term };
                }
            }
        }
        s
    });
    t.with_class(SymmetryClass::S2Lambda2)
}

/// The same tensor from products only; agrees with `curvature_flat` for invariant metrics:
/// `−h([x,y],[z,w]) + h(y•z, w•x) − h(x•z, w•y) + h(z•y, x•w) − h(z•x, y•w)`.
pub fn curvature_flat_expanded<T: Scalar>(m: &MetrizedAlgebra<T>) -> Rank4Tensor<T> {
    let a = m.algebra();
    let n = a.dim();
    let prod: Vec<Vec<T>> = (0..n * n).map(|t| a.basis_product_dense(t / n, t % n)).collect();
    let lowered: Vec<Vec<T>> = prod.iter().map(|v| m.form().lower(v)).collect();
    let p = |i: usize, j: usize| &prod[i * n + j];
    let hp = |i: usize, j: usize, k: usize, l: usize| crate::linalg::dot(p(i, j), &lowered[k * n + l]);
    Rank4Tensor::from_fn(n, |i, j, k, l| {
        let br_ij = crate::linalg::sub(p(i, j), p(j, i));
        let br_kl = crate::linalg::sub(p(k, l), p(l, k));
        -m.h(&br_ij, &br_kl) + hp(j, k, l, i) - hp(i, k, l, j) + hp(k, j, i, l) - hp(k, i, j, l)
    })
}
