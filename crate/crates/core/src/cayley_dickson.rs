//! Hurwitz algebras by Cayley–Dickson doubling, and matrices over them.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::{self, BilinearForm};
use crate::scalar::Scalar;

/// Real dimension `2^level` of the Hurwitz algebra ℝ, ℂ, ℍ, 𝕆.
pub fn hurwitz_dim(level: u32) -> usize {
    1 << level
}

/// `(a, b)‾ = (ā, −b)`
pub fn conj<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut out: Vec<T> = x.iter().map(|c| -c.clone()).collect();
    out[0] = x[0].clone();
    out
}

/// `(a, b)(c, d) = (ac − d̄b, da + bc̄)`
pub fn cd_mul<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    if n == 1 {
        return vec![x[0].clone() * y[0].clone()];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let first = linalg::sub(&cd_mul(a, c), &cd_mul(&conj(d), b));
    let second = linalg::add(&cd_mul(d, a), &cd_mul(b, &conj(c)));
    let mut out = first;
    out.extend(second);
    out
}

pub fn hurwitz_algebra<T: Scalar>(level: u32) -> Result<Algebra<T>> {
    if level > 3 {
        return Err(Error::InvalidParams(format!("hurwitz level must be 0..=3, got {level}")));
    }
    let d = hurwitz_dim(level);
    let labels = (0..d).map(|i| format!("e{i}")).collect();
    Algebra::from_products(d, |i, j| cd_mul(&linalg::basis(d, i), &linalg::basis(d, j)))?.with_labels(labels)
}

/// `q(x) = Σ x_i²` as a bilinear form; its polarization is `2q`.
pub fn hurwitz_norm<T: Scalar>(level: u32) -> BilinearForm<T> {
    BilinearForm::identity(hurwitz_dim(level))
}

/// An `n × n` matrix with entries in the level-`level` Hurwitz algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix<T> {
    pub n: usize,
    pub d: usize,
    pub entries: Vec<Vec<T>>,
}

impl<T: Scalar> HMatrix<T> {
    pub fn zero(n: usize, level: u32) -> Self {
        let d = hurwitz_dim(level);
        HMatrix { n, d, entries: vec![linalg::zeros(d); n * n] }
    }

    /// `u e_ij` with `u` the unit index of the entry.
    pub fn unit(n: usize, level: u32, i: usize, j: usize, u: usize) -> Self {
        let mut m = Self::zero(n, level);
        m.entries[i * n + j][u] = T::one();
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &[T] {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Vec<T>) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = HMatrix { n, d: self.d, entries: vec![linalg::zeros(self.d); n * n] };
        for i in 0..n {
            for k in 0..n {
                let mut s = linalg::zeros(self.d);
                for j in 0..n {
                    s = linalg::add(&s, &cd_mul(self.get(i, j), other.get(j, k)));
                }
                out.entries[i * n + k] = s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| linalg::add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| linalg::sub(a, b))
    }

    pub fn scale(&self, s: &T) -> Self {
        HMatrix { n: self.n, d: self.d, entries: self.entries.iter().map(|e| linalg::scale(s, e)).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(&[T], &[T]) -> Vec<T>) -> Self {
        HMatrix { n: self.n, d: self.d, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[i * n + j] = conj(self.get(j, i));
            }
        }
        out
    }

    /// `Re tr(x)`
    pub fn re_trace(&self) -> T {
        (0..self.n).fold(T::zero(), |s, i| s + self.get(i, i)[0].clone())
    }

    /// `Re tr(x̄ᵗ y)`: the Euclidean product of the real coordinates.
    pub fn frobenius(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |s, (a, b)| s + linalg::dot(a, b))
    }

    /// `½(xy + yx)`
    pub fn jordan(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self)).scale(&T::half())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }
}

/// A real subspace of `mat(n, K)` spanned by `basis`, closed under `product`.
/// Structure constants come from solving the Frobenius Gram system and are verified exactly
/// (to `1e-9` in float mode) by reconstruction.
pub fn matrix_space_algebra<T: Scalar>(
    basis: &[HMatrix<T>],
    product: impl Fn(&HMatrix<T>, &HMatrix<T>) -> HMatrix<T>,
) -> Result<Algebra<T>> {
    let dim = basis.len();
    let gram = crate::linalg::LinearMap::from_rows(
        (0..dim).map(|i| (0..dim).map(|j| basis[i].frobenius(&basis[j])).collect()).collect(),
    )?;
    let gram_inv = crate::linalg::inverse(&gram)?;
    let coords = |m: &HMatrix<T>| -> Result<Vec<T>> {
        let rhs: Vec<T> = basis.iter().map(|b| b.frobenius(m)).collect();
        let c = gram_inv.apply(&rhs);
        let mut back = HMatrix { n: m.n, d: m.d, entries: vec![linalg::zeros(m.d); m.n * m.n] };
        for (b, ci) in basis.iter().zip(&c) {
            back = back.add(&b.scale(ci));
        }
        let resid = back.sub(m).entries.iter().map(|e| linalg::max_abs(e)).fold(T::zero(), |a, b| if b > a { b } else { a });
        if !resid.negligible() {
            return Err(Error::Construction(format!("product leaves the span (residual {resid})")));
        }
        Ok(c)
    };
    let mut table = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            table.push(coords(&product(&basis[i], &basis[j]))?);
        }
    }
    Algebra::from_products(dim, |i, j| table[i * dim + j].clone())
}

/// Hermitian basis: diagonal units `e_ii`, then `u e_ij + ū e_ji` for `i < j` and each unit `u`.
pub fn hermitian_basis<T: Scalar>(n: usize, level: u32) -> Vec<(String, HMatrix<T>)> {
    let d = hurwitz_dim(level);
    let mut out = Vec::new();
    for i in 0..n {
        out.push((format!("e{}{}", i + 1, i + 1), HMatrix::unit(n, level, i, i, 0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            for u in 0..d {
                let mut m = HMatrix::unit(n, level, i, j, u);
                m.set(j, i, conj(&linalg::basis(d, u)));
                let name = if u == 0 { format!("s{}{}", i + 1, j + 1) } else { format!("u{}.s{}{}", u, i + 1, j + 1) };
                out.push((name, m));
            }
        }
    }
    out
}

/// All of `mat(n, K)`: `u e_ij` ordered by `(i, j, u)`.
pub fn full_matrix_basis<T: Scalar>(n: usize, level: u32) -> Vec<HMatrix<T>> {
    let d = hurwitz_dim(level);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for u in 0..d {
                out.push(HMatrix::unit(n, level, i, j, u));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::{check_identity, Identity};
    use crate::scalar::{rat, Rat};

    #[test]
    fn quaternion_units() {
        let e = |i| linalg::basis::<Rat>(4, i);
        // i j = k, j i = −k, i² = −1
        assert_eq!(cd_mul(&e(1), &e(2)), e(3));
        assert_eq!(cd_mul(&e(2), &e(1)), linalg::scale(&rat(-1, 1), &e(3)));
        assert_eq!(cd_mul(&e(1), &e(1)), linalg::scale(&rat(-1, 1), &e(0)));
    }

    #[test]
    fn octonion_norm_is_multiplicative() {
        let x: Vec<Rat> = (0..8).map(|i| rat(i * 3 % 7 - 3, 1)).collect();
        let y: Vec<Rat> = (0..8).map(|i| rat(i * 5 % 11 - 4, 2)).collect();
        let q = |v: &[Rat]| linalg::dot(v, v);
        assert_eq!(q(&cd_mul(&x, &y)), q(&x) * q(&y));
        // x x̄ = q(x) e
        assert_eq!(cd_mul(&x, &conj(&x)), linalg::scale(&q(&x), &linalg::basis(8, 0)));
    }

    #[test]
    fn alternativity_chain() {
        for level in 0..=3 {
            let a = hurwitz_algebra::<Rat>(level).unwrap();
            assert!(check_identity(&a, Identity::Alternative).passed, "level {level}");
            assert_eq!(check_identity(&a, Identity::Associative).passed, level < 3);
        }
        assert!(hurwitz_algebra::<Rat>(4).is_err());
    }

    #[test]
    fn hermitian_basis_closes_under_jordan_product() {
        let basis: Vec<HMatrix<Rat>> = hermitian_basis(3, 2).into_iter().map(|b| b.1).collect();
        assert_eq!(basis.len(), 3 + 4 * 3);
        let a = matrix_space_algebra(&basis, |x, y| x.jordan(y)).unwrap();
        assert!(check_identity(&a, Identity::Commutative).passed);
    }

    #[test]
    fn non_closed_span_is_rejected() {
        // the diagonal units alone are closed; one off-diagonal unit is not
        let basis = vec![HMatrix::<Rat>::unit(2, 0, 0, 1, 0)];
        assert!(matches!(
            matrix_space_algebra(&basis, |x, y| x.add(&y.conj_transpose())),
            Err(Error::Construction(_))
        ));
    }
}
