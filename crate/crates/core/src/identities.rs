//! Polynomial identities checked over all basis tuples, curvature operators and the torsion tensor.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, DerivedKind, SparseVec};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, LinearMap};
use crate::scalar::{NumericMode, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Commutative,
    Anticommutative,
    Associative,
    Flexible,
    Antiflexible,
    Alternative,
    LeftSymmetric,
    LieAdmissible,
    AssociatorCyclic,
    Jordan,
    Malcev,
    FourthPowerAssociative,
    /// `A(x) = L(x) − R(x)` is a derivation for every `x`.
    CommutatorDerivation,
    /// `ℛ(x,y) = ℛ̄(x,y)`
    SelfAdjointCurvature,
}

impl Identity {
    pub const ALL: [Identity; 14] = [
        Identity::Commutative,
        Identity::Anticommutative,
        Identity::Associative,
        Identity::Flexible,
        Identity::Antiflexible,
        Identity::Alternative,
        Identity::LeftSymmetric,
        Identity::LieAdmissible,
        Identity::AssociatorCyclic,
        Identity::Jordan,
        Identity::Malcev,
        Identity::FourthPowerAssociative,
        Identity::CommutatorDerivation,
        Identity::SelfAdjointCurvature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Commutative => "commutative",
            Identity::Anticommutative => "anticommutative",
            Identity::Associative => "associative",
            Identity::Flexible => "flexible",
            Identity::Antiflexible => "antiflexible",
            Identity::Alternative => "alternative",
            Identity::LeftSymmetric => "left_symmetric",
            Identity::LieAdmissible => "lie_admissible",
            Identity::AssociatorCyclic => "associator_cyclic",
            Identity::Jordan => "jordan",
            Identity::Malcev => "malcev",
            Identity::FourthPowerAssociative => "fourth_power_associative",
            Identity::CommutatorDerivation => "commutator_derivation",
            Identity::SelfAdjointCurvature => "self_adjoint_curvature",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == key)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

/// Outcome of an identity check: the largest coordinate of the defining tensor over all
/// basis tuples, with the lexicographically smallest tuple attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub identity: String,
    pub mode: NumericMode,
    pub max_defect: f64,
    pub exact_defect: String,
    pub witness: Option<Vec<usize>>,
    pub passed: bool,
}

impl DefectReport {
    pub fn from_scan<T: Scalar>(identity: &str, scan: (T, Option<Vec<usize>>)) -> Self {
        let (d, w) = scan;
        DefectReport {
            identity: identity.to_string(),
            mode: T::MODE,
            max_defect: d.to_f64(),
            exact_defect: d.to_string(),
            passed: d.negligible(),
            witness: if d.is_zero() { None } else { w },
        }
    }
}

/// Dense accumulator for signed sums of sparse vectors.
struct Acc<T> {
    v: Vec<T>,
}

impl<T: Scalar> Acc<T> {
    fn new(n: usize) -> Self {
        Acc { v: linalg::zeros(n) }
    }

    fn add(&mut self, s: &SparseVec<T>) -> &mut Self {
        for (k, c) in s {
            self.v[*k] = self.v[*k].clone() + c.clone();
        }
        self
    }

    fn sub(&mut self, s: &SparseVec<T>) -> &mut Self {
        for (k, c) in s {
            self.v[*k] = self.v[*k].clone() - c.clone();
        }
        self
    }

    fn max(&self) -> T {
        linalg::max_abs(&self.v)
    }
}

/// Product of two sparse vectors.
pub fn sparse_mul<T: Scalar>(a: &Algebra<T>, x: &[(usize, T)], y: &[(usize, T)]) -> SparseVec<T> {
    let mut acc: Vec<T> = linalg::zeros(a.dim());
    let mut touched = false;
    for (i, xi) in x {
        for (j, yj) in y {
            let row = a.basis_product(*i, *j);
            if row.is_empty() {
                continue;
            }
            touched = true;
            let s = xi.clone() * yj.clone();
            for (k, c) in row {
                acc[*k] = acc[*k].clone() + s.clone() * c.clone();
            }
        }
    }
    if !touched {
        return Vec::new();
    }
    to_sparse(acc)
}

fn to_sparse<T: Scalar>(v: Vec<T>) -> SparseVec<T> {
    v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

fn unit<T: Scalar>(i: usize) -> SparseVec<T> {
    vec![(i, T::one())]
}

/// Scans all `arity`-tuples passing `keep` in lexicographic order; `defect` returns the
/// max coordinate of the identity tensor at that tuple.
pub fn scan_tuples<T, K, F>(n: usize, arity: usize, keep: K, defect: F) -> (T, Option<Vec<usize>>)
where
    T: Scalar,
    K: Fn(&[usize]) -> bool + Sync,
    F: Fn(&[usize]) -> T + Sync,
{
    let per_first: Vec<(T, Option<Vec<usize>>)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best = T::zero();
            let mut wit = None;
            let mut t = vec![0usize; arity];
            t[0] = first;
            let rest = arity - 1;
            let total = n.pow(rest as u32);
            for code in 0..total {
                let mut c = code;
                for slot in (1..arity).rev() {
                    t[slot] = c % n;
                    c /= n;
                }
                if !keep(&t) {
                    continue;
                }
                let d = defect(&t);
                if d > best {
                    best = d;
                    wit = Some(t.clone());
                }
            }
            (best, wit)
        })
        .collect();
    let mut best = T::zero();
    let mut wit = None;
    for (d, w) in per_first {
        if d > best {
            best = d;
            wit = w;
        }
    }
    (best, wit)
}

fn nondecreasing(t: &[usize], slots: &[usize]) -> bool {
    slots.windows(2).all(|w| t[w[0]] <= t[w[1]])
}

pub fn check_identity<T: Scalar>(a: &Algebra<T>, id: Identity) -> DefectReport {
    let scan = identity_scan(a, id);
    DefectReport::from_scan(id.name(), scan)
}

pub fn check_identity_by_name<T: Scalar>(a: &Algebra<T>, name: &str) -> Result<DefectReport> {
    Ok(check_identity(a, name.parse()?))
}

fn identity_scan<T: Scalar>(a: &Algebra<T>, id: Identity) -> (T, Option<Vec<usize>>) {
    let n = a.dim();
    let p = |x: &SparseVec<T>, y: &SparseVec<T>| sparse_mul(a, x, y);
    let asc = |x: &SparseVec<T>, y: &SparseVec<T>, z: &SparseVec<T>| {
        let mut acc = Acc::new(n);
        acc.add(&p(&p(x, y), z)).sub(&p(x, &p(y, z)));
        to_sparse(acc.v)
    };
    let e = |i: usize| unit::<T>(i);
    match id {
        Identity::Commutative => scan_tuples(n, 2, |t| t[0] < t[1], |t| {
            Acc::new(n).add(&p(&e(t[0]), &e(t[1]))).sub(&p(&e(t[1]), &e(t[0]))).max()
        }),
        Identity::Anticommutative => scan_tuples(n, 2, |t| t[0] <= t[1], |t| {
            Acc::new(n).add(&p(&e(t[0]), &e(t[1]))).add(&p(&e(t[1]), &e(t[0]))).max()
        }),
        Identity::Associative => scan_tuples(n, 3, |_| true, |t| {
            linalg::max_abs(&a.basis_assoc(t[0], t[1], t[2]))
        }),
        // [a,y,b] + [b,y,a]
        Identity::Flexible => scan_tuples(n, 3, |t| t[0] <= t[2], |t| {
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            Acc::new(n).add(&asc(&x, &y, &z)).add(&asc(&z, &y, &x)).max()
        }),
        Identity::Antiflexible => scan_tuples(n, 3, |t| t[0] < t[2], |t| {
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            Acc::new(n).add(&asc(&x, &y, &z)).sub(&asc(&z, &y, &x)).max()
        }),
        // [a,b,y] + [b,a,y] and [y,a,b] + [y,b,a]
        Identity::Alternative => scan_tuples(n, 3, |t| t[0] <= t[1], |t| {
            let (x, w, y) = (e(t[0]), e(t[1]), e(t[2]));
            let l = Acc::new(n).add(&asc(&x, &w, &y)).add(&asc(&w, &x, &y)).max();
            let r = Acc::new(n).add(&asc(&y, &x, &w)).add(&asc(&y, &w, &x)).max();
            if l > r {
                l
            } else {
                r
            }
        }),
        Identity::LeftSymmetric => scan_tuples(n, 3, |t| t[0] < t[1], |t| {
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            Acc::new(n).add(&asc(&x, &y, &z)).sub(&asc(&y, &x, &z)).max()
        }),
        Identity::LieAdmissible => scan_tuples(n, 3, |t| t[0] < t[1] && t[1] < t[2], |t| {
            linalg::max_abs(&at_basis(a, t[0], t[1], t[2]))
        }),
        Identity::AssociatorCyclic => scan_tuples(n, 3, |_| true, |t| {
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            Acc::new(n).add(&asc(&x, &y, &z)).add(&asc(&z, &x, &y)).add(&asc(&y, &z, &x)).max()
        }),
        // commutativity plus [ab,y,c] + [bc,y,a] + [ca,y,b] = 0
        Identity::Jordan => {
            let comm = identity_scan(a, Identity::Commutative);
            let lin = scan_tuples(n, 4, |t| nondecreasing(t, &[0, 1, 2]), |t| {
                let (x, w, z, y) = (e(t[0]), e(t[1]), e(t[2]), e(t[3]));
                Acc::new(n)
                    .add(&asc(&p(&x, &w), &y, &z))
                    .add(&asc(&p(&w, &z), &y, &x))
                    .add(&asc(&p(&z, &x), &y, &w))
                    .max()
            });
            merge(comm, lin)
        }
        Identity::Malcev => {
            let anti = identity_scan(a, Identity::Anticommutative);
            let lin = scan_tuples(n, 4, |t| t[0] <= t[1], |t| {
                let (x1, x2, y, z) = (e(t[0]), e(t[1]), e(t[2]), e(t[3]));
                let mut acc = Acc::new(n);
                for (u, v) in [(&x1, &x2), (&x2, &x1)] {
                    // (uy)(vz) − ((uy)z)v − ((yz)u)v − ((zu)v)y
                    acc.add(&p(&p(u, &y), &p(v, &z)))
                        .sub(&p(&p(&p(u, &y), &z), v))
                        .sub(&p(&p(&p(&y, &z), u), v))
                        .sub(&p(&p(&p(&z, u), v), &y));
                }
                acc.max()
            });
            merge(anti, lin)
        }
        Identity::FourthPowerAssociative => {
            let perms3 = permutations(3);
            let perms4 = permutations(4);
            let cube = scan_tuples(n, 3, |t| nondecreasing(t, &[0, 1, 2]), |t| {
                let mut acc = Acc::new(n);
                for s in &perms3 {
                    acc.add(&asc(&e(t[s[0]]), &e(t[s[1]]), &e(t[s[2]])));
                }
                acc.max()
            });
            let fourth = scan_tuples(n, 4, |t| nondecreasing(t, &[0, 1, 2, 3]), |t| {
                let mut acc = Acc::new(n);
                for s in &perms4 {
                    let v: Vec<SparseVec<T>> = s.iter().map(|&i| e(t[i])).collect();
                    acc.add(&p(&p(&v[0], &v[1]), &p(&v[2], &v[3])))
                        .sub(&p(&p(&p(&v[0], &v[1]), &v[2]), &v[3]));
                }
                acc.max()
            });
            merge(cube, fourth)
        }
        // A(x)(yz) − (A(x)y)z − y(A(x)z)
        Identity::CommutatorDerivation => scan_tuples(n, 3, |_| true, |t| {
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            let ax = |v: &SparseVec<T>| {
                let mut acc = Acc::new(n);
                acc.add(&p(&x, v)).sub(&p(v, &x));
                to_sparse(acc.v)
            };
            Acc::new(n).add(&ax(&p(&y, &z))).sub(&p(&ax(&y), &z)).sub(&p(&y, &ax(&z))).max()
        }),
        // ℛ(x,y)z − ℛ̄(x,y)z = −[x,y,z] + [y,x,z] + [z,x,y] − [z,y,x]
        Identity::SelfAdjointCurvature => scan_tuples(n, 3, |t| t[0] < t[1], |t| {
            let (i, j, k) = (t[0], t[1], t[2]);
            let mut v = linalg::sub(&a.basis_assoc(j, i, k), &a.basis_assoc(i, j, k));
            v = linalg::add(&v, &a.basis_assoc(k, i, j));
            v = linalg::sub(&v, &a.basis_assoc(k, j, i));
            linalg::max_abs(&v)
        }),
    }
}

fn merge<T: Scalar>(a: (T, Option<Vec<usize>>), b: (T, Option<Vec<usize>>)) -> (T, Option<Vec<usize>>) {
    if b.0 > a.0 {
        b
    } else {
        a
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// `AT` on basis elements.
fn at_basis<T: Scalar>(a: &Algebra<T>, i: usize, j: usize, k: usize) -> Vec<T> {
    let mut v = linalg::zeros(a.dim());
    for (s, sign) in [([i, j, k], 1), ([j, k, i], 1), ([k, i, j], 1), ([j, i, k], -1), ([i, k, j], -1), ([k, j, i], -1)] {
        let w = a.basis_assoc(s[0], s[1], s[2]);
        v = if sign > 0 { linalg::add(&v, &w) } else { linalg::sub(&v, &w) };
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// `ℛ(x,y) = [L(x),L(y)] − L([x,y])` or `ℛ̄(x,y) = [R(x),R(y)] + R([x,y])`.
pub fn curvature<T: Scalar>(a: &Algebra<T>, side: Side, x: &[T], y: &[T]) -> Result<LinearMap<T>> {
    check_dim(a.dim(), x.len())?;
    check_dim(a.dim(), y.len())?;
    let br = a.bracket(x, y);
    Ok(match side {
        Side::Left => a.left_op(x).commutator(&a.left_op(y)).sub(&a.left_op(&br)),
        Side::Right => a.right_op(x).commutator(&a.right_op(y)).add(&a.right_op(&br)),
    })
}

/// `AT(x,y,z) = Σ_σ sign(σ)[x_σ1, x_σ2, x_σ3]`
pub fn at_tensor<T: Scalar>(a: &Algebra<T>, x: &[T], y: &[T], z: &[T]) -> Result<Vec<T>> {
    for v in [x, y, z] {
        check_dim(a.dim(), v.len())?;
    }
    let mut out = linalg::zeros(a.dim());
    let args = [x, y, z];
    for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)] {
        let w = a.assoc(args[p[0]], args[p[1]], args[p[2]]);
        out = if sign > 0 { linalg::add(&out, &w) } else { linalg::sub(&out, &w) };
    }
    Ok(out)
}

/// Residuals of the two differential Bianchi identities over all basis triples:
/// `cyc([L(x),ℛ(y,z)] − ℛ(L(x)y,z) − ℛ(y,L(x)z)) = L(AT(x,y,z))` and the same with `R`, `ℛ̄`.
pub fn diff_bianchi<T: Scalar>(a: &Algebra<T>) -> (DefectReport, DefectReport) {
    let n = a.dim();
    let e = |i| linalg::basis::<T>(n, i);
    let side_scan = |side: Side| {
        scan_tuples(n, 3, |t| t[0] < t[1] && t[1] < t[2], |t| {
            let mult = |u: &[T]| match side {
                Side::Left => a.left_op(u),
                Side::Right => a.right_op(u),
            };
            let curv = |u: &[T], v: &[T]| curvature(a, side, u, v).expect("dims match");
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            let mut lhs = LinearMap::zero(n);
            for (u, v, w) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
                let m = mult(u);
                let term = m
                    .commutator(&curv(v, w))
                    .sub(&curv(&m.apply(v), w))
                    .sub(&curv(v, &m.apply(w)));
                lhs = lhs.add(&term);
            }
            let rhs = mult(&at_tensor(a, &x, &y, &z).expect("dims match"));
            lhs.sub(&rhs).max_abs()
        })
    };
    (
        DefectReport::from_scan("diff_bianchi_left", side_scan(Side::Left)),
        DefectReport::from_scan("diff_bianchi_right", side_scan(Side::Right)),
    )
}

/// `[x,y,z]_∘ + [x,y,z]_[,] = 2[x,y,z] − 2[z,y,x]` over all basis triples.
pub fn prepoisson_defect<T: Scalar>(a: &Algebra<T>) -> DefectReport {
    let n = a.dim();
    let sym = a.derived(DerivedKind::Symmetrized);
    let br = a.derived(DerivedKind::Bracket);
    let two = T::from_i64(2);
    let scan = scan_tuples(n, 3, |_| true, |t| {
        let (i, j, k) = (t[0], t[1], t[2]);
        let lhs = linalg::add(&sym.basis_assoc(i, j, k), &br.basis_assoc(i, j, k));
        let rhs = linalg::scale(&two, &linalg::sub(&a.basis_assoc(i, j, k), &a.basis_assoc(k, j, i)));
        linalg::max_abs(&linalg::sub(&lhs, &rhs))
    });
    DefectReport::from_scan("prepoisson", scan)
}

/// Largest `|ℛ(e_i,e_j) − ℛ̄(e_i,e_j)|` entry over basis pairs.
pub fn curvature_self_adjointness<T: Scalar>(a: &Algebra<T>) -> T {
    check_identity_scan_value(a, Identity::SelfAdjointCurvature)
}

fn check_identity_scan_value<T: Scalar>(a: &Algebra<T>, id: Identity) -> T {
    identity_scan(a, id).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use crate::scalar::{rat, Rat};

    fn r(v: i64) -> Rat {
        rat(v, 1)
    }

    /// x⋆y = (x₂y₃, x₃y₁, x₁y₂)
    fn star() -> Algebra<Rat> {
        Algebra::new(3, vec![(1, 2, 0, r(1)), (2, 0, 1, r(1)), (0, 1, 2, r(1))], None).unwrap()
    }

    fn cross() -> Algebra<Rat> {
        star().derived(DerivedKind::Bracket)
    }

    #[test]
    fn names_round_trip() {
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
        assert!(matches!("power".parse::<Identity>(), Err(Error::UnknownIdentity(_))));
        assert_eq!("left-symmetric".parse::<Identity>().unwrap(), Identity::LeftSymmetric);
    }

    #[test]
    fn cross_product_is_lie() {
        let a = cross();
        for id in [Identity::Anticommutative, Identity::LieAdmissible, Identity::Malcev, Identity::Flexible] {
            assert!(check_identity(&a, id).passed, "{id}");
        }
        assert!(!check_identity(&a, Identity::Associative).passed);
        assert!(!check_identity(&a, Identity::Commutative).passed);
    }

    #[test]
    fn lie_curvature_is_minus_ad_of_product() {
        // with • a Lie bracket, [x,y] = 2x•y and ℛ(x,y) = −L(x•y)
        let a = cross();
        let x = vec![r(1), r(-2), r(3)];
        let y = vec![r(0), r(5), rat(1, 2)];
        let rc = curvature(&a, Side::Left, &x, &y).unwrap();
        assert_eq!(rc, a.left_op(&a.mul(&x, &y)).neg());
        assert_eq!(curvature(&a, Side::Right, &x, &y).unwrap(), rc);
        assert!(at_tensor(&a, &x, &y, &[r(1), r(1), r(1)]).unwrap().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn star_is_antiflexible_not_flexible() {
        let a = star();
        assert!(check_identity(&a, Identity::Antiflexible).passed);
        assert!(check_identity(&a, Identity::LieAdmissible).passed);
        let f = check_identity(&a, Identity::Flexible);
        assert!(!f.passed && f.witness.is_some());
    }

    #[test]
    fn associative_algebra_has_flat_curvature() {
        // 2×2 real matrices
        let idx = |i: usize, j: usize| 2 * i + j;
        let mut c = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    c.push((idx(i, j), idx(j, k), idx(i, k), r(1)));
                }
            }
        }
        let a = Algebra::new(4, c, None).unwrap();
        assert!(check_identity(&a, Identity::Associative).passed);
        assert!(check_identity(&a, Identity::Alternative).passed);
        let x = vec![r(1), r(2), r(-1), r(0)];
        let y = vec![r(3), r(0), r(1), r(1)];
        assert!(curvature(&a, Side::Left, &x, &y).unwrap().is_zero());
        assert!(!check_identity(&a, Identity::Jordan).passed);
        assert!(check_identity(&a.derived(DerivedKind::Symmetrized), Identity::Jordan).passed);
        assert!(check_identity(&a, Identity::FourthPowerAssociative).passed);
    }

    #[test]
    fn bianchi_and_prepoisson_on_star() {
        let (l, rr) = diff_bianchi(&star());
        assert!(l.passed && rr.passed);
        assert!(prepoisson_defect(&star()).passed);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
    }
}
