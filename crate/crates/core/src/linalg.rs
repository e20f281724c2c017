//! Vectors, square operators and symmetric forms over a [`Scalar`].

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::scalar::{NumericMode, Scalar};

/// Coordinate vector in a fixed basis.
pub type Element<T> = Vec<T>;

pub fn zeros<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::zero(); n]
}

pub fn basis<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = zeros(n);
    v[i] = T::one();
    v
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s = s + x.clone() * y.clone();
        }
    }
    s
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<T: Scalar>(s: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| s.clone() * x.clone()).collect()
}

/// `a += s * b`
pub fn axpy<T: Scalar>(a: &mut [T], s: &T, b: &[T]) {
    if s.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = x.clone() + s.clone() * y.clone();
        }
    }
}

pub fn max_abs<T: Scalar>(a: &[T]) -> T {
    let mut m = T::zero();
    for x in a {
        let ax = x.abs();
        if ax > m {
            m = ax;
        }
    }
    m
}

pub fn to_f64_vec<T: Scalar>(a: &[T]) -> Vec<f64> {
    a.iter().map(|x| x.to_f64()).collect()
}

pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Square matrix acting on coordinate vectors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> LinearMap<T> {
    pub fn zero(n: usize) -> Self {
        LinearMap { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            check_dim(n, r.len())?;
            data.extend(r);
        }
        Ok(LinearMap { n, data })
    }

    /// Builds the map whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let n = cols.len();
        let mut m = Self::zero(n);
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.data[i * n + j] = v.clone();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * n + j;
                        out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        LinearMap { n: self.n, data: add(&self.data, &other.data) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        LinearMap { n: self.n, data: sub(&self.data, &other.data) }
    }

    pub fn scale(&self, s: &T) -> Self {
        LinearMap { n: self.n, data: scale(s, &self.data) }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    /// `[self, other] = self∘other − other∘self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            s = s + self.get(i, i).clone();
        }
        s
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.negligible())
    }

    pub fn to_f64(&self) -> LinearMap<f64> {
        LinearMap { n: self.n, data: to_f64_vec(&self.data) }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64())
    }
}

/// Symmetric bilinear form given by its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> BilinearForm<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = LinearMap::from_rows(rows)?;
        Self::from_map(&m)
    }

    pub fn from_map(m: &LinearMap<T>) -> Result<Self> {
        let n = m.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(BilinearForm { n, data: m.entries().to_vec() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(rows)
    }

    pub fn identity(n: usize) -> Self {
        BilinearForm { n, data: LinearMap::identity(n).data }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        let mut m = LinearMap::zero(n);
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        BilinearForm { n, data: m.data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn as_map(&self) -> LinearMap<T> {
        LinearMap { n: self.n, data: self.data.clone() }
    }

    /// `H x`, the covector `h(x, ·)` in coordinates.
    pub fn lower(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x)).collect()
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> T {
        dot(&self.lower(x), y)
    }

    pub fn quad(&self, x: &[T]) -> T {
        self.eval(x, x)
    }

    pub fn scale(&self, s: &T) -> Self {
        BilinearForm { n: self.n, data: scale(s, &self.data) }
    }

    pub fn to_f64(&self) -> BilinearForm<f64> {
        BilinearForm { n: self.n, data: to_f64_vec(&self.data) }
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut m = LinearMap::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.set(self.n + i, self.n + j, other.get(i, j).clone());
            }
        }
        BilinearForm { n, data: m.data }
    }

    /// `h ⊗ k` on the product basis `e_i ⊗ f_a ↦ i * dim(k) + a`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.n;
        let n = self.n * m;
        let mut data = vec![T::zero(); n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                let h = self.get(i, j);
                if h.is_zero() {
                    continue;
                }
                for a in 0..m {
                    for b in 0..m {
                        data[(i * m + a) * n + (j * m + b)] = h.clone() * other.get(a, b).clone();
                    }
                }
            }
        }
        BilinearForm { n, data }
    }

    pub fn determinant(&self) -> T {
        determinant(&self.as_map())
    }

    pub fn inertia(&self) -> Inertia {
        inertia(self)
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    /// Nondegeneracy: exact in rational mode; `|det| > 1e-12·max|h_ij|^n` in float mode.
    pub fn is_nondegenerate(&self) -> bool {
        let det = self.determinant();
        match T::MODE {
            NumericMode::Rational => !det.is_zero(),
            NumericMode::Float => {
                let m = self.max_abs().to_f64();
                det.to_f64().abs() > 1e-12 * m.powi(self.n as i32)
            }
        }
    }
}

/// Counts of positive, negative and zero squares of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    PositiveSemidefinite,
    NegativeSemidefinite,
    Zero,
}

impl Inertia {
    pub fn definiteness(&self) -> Definiteness {
        match (self.positive, self.negative, self.zero) {
            (0, 0, _) => Definiteness::Zero,
            (_, 0, 0) => Definiteness::PositiveDefinite,
            (0, _, 0) => Definiteness::NegativeDefinite,
            (_, 0, _) => Definiteness::PositiveSemidefinite,
            (0, _, _) => Definiteness::NegativeSemidefinite,
            _ => Definiteness::Indefinite,
        }
    }
}

/// Sylvester inertia. Rational forms are diagonalized exactly by congruence;
/// float forms use a symmetric eigendecomposition with a 1e-10 zero cutoff.
pub fn inertia<T: Scalar>(h: &BilinearForm<T>) -> Inertia {
    let n = h.dim();
    let mut count = Inertia { positive: 0, negative: 0, zero: 0 };
    if T::MODE == NumericMode::Float {
        let eig = h.as_map().to_dmatrix().symmetric_eigen();
        for &l in eig.eigenvalues.iter() {
            if l > 1e-10 {
                count.positive += 1;
            } else if l < -1e-10 {
                count.negative += 1;
            } else {
                count.zero += 1;
            }
        }
        return count;
    }
    let mut a: Vec<Vec<T>> = h.rows();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let p = match active.iter().position(|&i| !a[i][i].is_zero()) {
            Some(p) => active[p],
            None => {
                // all remaining diagonal entries vanish; look for an off-diagonal one
                let mut pair = None;
                'outer: for (s, &i) in active.iter().enumerate() {
                    for &j in &active[s + 1..] {
                        if !a[i][j].is_zero() {
                            pair = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let Some((i, j)) = pair else {
                    count.zero += active.len();
                    break;
                };
                // replace e_i by e_i + e_j: row and column operation
                for k in 0..n {
                    let v = a[i][k].clone() + a[j][k].clone();
                    a[i][k] = v;
                }
                for k in 0..n {
                    let v = a[k][i].clone() + a[k][j].clone();
                    a[k][i] = v;
                }
                i
            }
        };
        let d = a[p][p].clone();
        if d > T::zero() {
            count.positive += 1;
        } else {
            count.negative += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            let f = a[i][p].clone() / d.clone();
            if f.is_zero() {
                continue;
            }
            for &k in &active {
                let v = a[i][k].clone() - f.clone() * a[p][k].clone();
                a[i][k] = v;
            }
            a[i][p] = T::zero();
            a[p][i] = T::zero();
        }
    }
    count
}

fn pivot_is_zero<T: Scalar>(v: &T, scale: f64) -> bool {
    match T::MODE {
        NumericMode::Rational => v.is_zero(),
        NumericMode::Float => v.to_f64().abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE),
    }
}

/// Row reduction returning (rank, determinant sign-carrying product of pivots).
fn eliminate<T: Scalar>(rows: &mut [Vec<T>], ncols: usize) -> (usize, T, Vec<usize>) {
    let nrows = rows.len();
    let scale = rows.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    let mut det = T::one();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let mut best: Option<usize> = None;
        let mut best_mag = 0.0;
        for r in rank..nrows {
            if pivot_is_zero(&rows[r][c], scale) {
                continue;
            }
            let m = rows[r][c].to_f64().abs();
            if best.is_none() || (T::MODE == NumericMode::Float && m > best_mag) {
                best = Some(r);
                best_mag = m;
            }
        }
        let Some(p) = best else {
            det = T::zero();
            continue;
        };
        if p != rank {
            rows.swap(p, rank);
            det = -det;
        }
        let pv = rows[rank][c].clone();
        det = det * pv.clone();
        for r in 0..nrows {
            if r == rank {
                continue;
            }
            let f = rows[r][c].clone() / pv.clone();
            if f.is_zero() {
                continue;
            }
            for k in c..rows[r].len() {
                let v = rows[r][k].clone() - f.clone() * rows[rank][k].clone();
                rows[r][k] = v;
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rank < ncols.min(nrows) {
        det = T::zero();
    }
    (rank, det, pivots)
}

pub fn determinant<T: Scalar>(m: &LinearMap<T>) -> T {
    let n = m.dim();
    let mut rows: Vec<Vec<T>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let (rank, det, _) = eliminate(&mut rows, n);
    if rank < n {
        T::zero()
    } else {
        det
    }
}

/// Rank of an arbitrary (possibly non-square) matrix given by rows.
pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut r = rows.to_vec();
    eliminate(&mut r, ncols).0
}

pub fn inverse<T: Scalar>(m: &LinearMap<T>) -> Result<LinearMap<T>> {
    let n = m.dim();
    let mut rows: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.extend(basis::<T>(n, i));
            r
        })
        .collect();
    let (rank, _, _) = eliminate(&mut rows, n);
    if rank < n {
        return Err(Error::Degenerate);
    }
    let mut out = LinearMap::zero(n);
    for (i, r) in rows.iter().enumerate() {
        let p = r[i].clone();
        for j in 0..n {
            out.set(i, j, r[n + j].clone() / p.clone());
        }
    }
    Ok(out)
}

/// Solves `m x = b`, failing when `m` is singular.
pub fn solve<T: Scalar>(m: &LinearMap<T>, b: &[T]) -> Result<Vec<T>> {
    Ok(inverse(m)?.apply(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    fn form(rows: &[&[i64]]) -> BilinearForm<Rat> {
        BilinearForm::new(rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn inertia_of_split_pairing_form() {
        // leading minors all vanish here, congruence still works
        let h = form(&[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]]);
        let i = h.inertia();
        assert_eq!((i.positive, i.negative, i.zero), (1, 1, 1));
        let h = form(&[&[0, 1], &[1, 0]]);
        assert_eq!(h.inertia().definiteness(), Definiteness::Indefinite);
    }

    #[test]
    fn inertia_float_matches_rational() {
        let h = form(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]);
        assert_eq!(h.inertia(), h.to_f64().inertia());
        assert_eq!(h.inertia().definiteness(), Definiteness::PositiveDefinite);
    }

    #[test]
    fn inverse_and_determinant() {
        let m = LinearMap::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ])
        .unwrap();
        assert_eq!(determinant(&m), rat(1, 1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv.compose(&m), LinearMap::identity(2));
        let sing = LinearMap::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]).unwrap();
        assert!(inverse(&sing).is_err());
        assert_eq!(rank(&[sing.row(0).to_vec(), sing.row(1).to_vec()]), 1);
    }

    #[test]
    fn rejects_asymmetric_forms() {
        let r = BilinearForm::new(vec![vec![rat(1, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]]);
        assert!(matches!(r, Err(Error::NotSymmetric { i: 0, j: 1 })));
    }

    #[test]
    fn kron_of_identities() {
        let a = BilinearForm::<Rat>::identity(2);
        let b = form(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.get(4, 4), &rat(3, 1));
        assert_eq!(k.get(0, 4), &rat(0, 1));
    }
}
