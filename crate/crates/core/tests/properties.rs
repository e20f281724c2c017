use alg_lab::algebra::{compose, Algebra, ComposeKind, DerivedKind, MetrizedAlgebra};
use alg_lab::identities::{at_tensor, check_identity, curvature_self_adjointness, diff_bianchi, prepoisson_defect, Identity};
use alg_lab::io;
use alg_lab::linalg::{self, BilinearForm};
use alg_lab::optimize::{gaussian, stream_rng, OptimizerConfig};
use alg_lab::presets::{self, random_metrized, RandomKind};
use alg_lab::scalar::{rat, Rat};
use alg_lab::sectional::{constant_sect, estimate_extrema, sect, sect_split};
use alg_lab::special::{self, SearchConfig};
use num::{One, Zero};
use proptest::prelude::*;
use serde_json::Map;

fn r(v: i64) -> Rat {
    rat(v, 1)
}

fn rv(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| r(x)).collect()
}

fn algebra_from(n: usize, table: &[i64]) -> Algebra<Rat> {
    Algebra::from_products(n, |i, j| (0..n).map(|k| r(table[(i * n + j) * n + k])).collect()).unwrap()
}

fn table(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -2i64..=2], n * n * n)
}

fn elem(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, n)
}

/// Product-form oracle `(h(x•x, y•y) − h(x•y, y•x)) / gram`.
fn sect_oracle(m: &MetrizedAlgebra<Rat>, x: &[Rat], y: &[Rat]) -> Rat {
    let h = m.form();
    let gram = h.quad(x) * h.quad(y) - h.eval(x, y) * h.eval(x, y);
    (h.eval(&m.mul(x, x), &m.mul(y, y)) - h.eval(&m.mul(x, y), &m.mul(y, x))) / gram
}

fn gram(m: &MetrizedAlgebra<Rat>, x: &[Rat], y: &[Rat]) -> Rat {
    let h = m.form();
    h.quad(x) * h.quad(y) - h.eval(x, y) * h.eval(x, y)
}

fn kind(k: u8) -> RandomKind {
    [RandomKind::General, RandomKind::Commutative, RandomKind::Anticommutative][k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_bilinear(
        (n, t, x, x2, y) in (2usize..=4).prop_flat_map(|n| (Just(n), table(n), elem(n), elem(n), elem(n))),
        alpha in -5i64..=5, beta in -5i64..=5,
    ) {
        let a = algebra_from(n, &t);
        let (x, x2, y) = (rv(&x), rv(&x2), rv(&y));
        let comb = linalg::add(&linalg::scale(&r(alpha), &x), &linalg::scale(&r(beta), &x2));
        let lhs = a.mul(&comb, &y);
        let rhs = linalg::add(&linalg::scale(&r(alpha), &a.mul(&x, &y)), &linalg::scale(&r(beta), &a.mul(&x2, &y)));
        prop_assert_eq!(lhs, rhs);
        let rhs_right = linalg::add(&linalg::scale(&r(alpha), &a.mul(&y, &x)), &linalg::scale(&r(beta), &a.mul(&y, &x2)));
        prop_assert_eq!(a.mul(&y, &comb), rhs_right);
    }

    #[test]
    fn killing_form_is_symmetric((n, t) in (2usize..=4).prop_flat_map(|n| (Just(n), table(n)))) {
        let k = algebra_from(n, &t).killing_form();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(k.get(i, j), k.get(j, i));
            }
        }
    }

    /// A cyclic trilinear form lowered through an arbitrary nondegenerate metric gives an
    /// invariant product; in dimension two it is always commutative.
    #[test]
    fn two_dimensional_metrized_algebras_commute(
        raw in prop::collection::vec(-3i64..=3, 8),
        h in (-3i64..=3, -3i64..=3, -3i64..=3),
    ) {
        let (h00, h01, h11) = h;
        prop_assume!(h00 * h11 - h01 * h01 != 0);
        let form = BilinearForm::new(vec![vec![r(h00), r(h01)], vec![r(h01), r(h11)]]).unwrap();
        let hinv = linalg::inverse(&form.as_map()).unwrap();
        let at = |i: usize, j: usize, k: usize| raw[(i * 2 + j) * 2 + k];
        let tau = |i, j, k| r(at(i, j, k) + at(j, k, i) + at(k, i, j));
        let a = Algebra::from_products(2, |i, j| {
            let lowered: Vec<Rat> = (0..2).map(|k| tau(i, j, k)).collect();
            hinv.apply(&lowered)
        }).unwrap();
        let m = MetrizedAlgebra::new(a, form).unwrap();
        prop_assert!(m.is_invariant());
        prop_assert!(check_identity(m.algebra(), Identity::Commutative).passed);
    }

    #[test]
    fn sect_depends_only_on_the_plane(
        seed in any::<u64>(), k in 0u8..3,
        (x, y) in (elem(3), elem(3)),
        (p, q, s, t) in (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3),
    ) {
        prop_assume!(p * t - q * s != 0);
        let m = random_metrized(seed, 3, kind(k)).unwrap();
        let (x, y) = (rv(&x), rv(&y));
        prop_assume!(!gram(&m, &x, &y).is_zero());
        let u = linalg::add(&linalg::scale(&r(p), &x), &linalg::scale(&r(q), &y));
        let v = linalg::add(&linalg::scale(&r(s), &x), &linalg::scale(&r(t), &y));
        let base = sect(&m, &x, &y).unwrap();
        prop_assert_eq!(&base, &sect_oracle(&m, &x, &y));
        prop_assert_eq!(sect(&m, &u, &v).unwrap(), base);
    }

    #[test]
    fn sect_splits_into_symmetric_and_bracket_parts(seed in any::<u64>(), k in 0u8..3, (x, y) in (elem(4), elem(4))) {
        let m = random_metrized(seed, 4, kind(k)).unwrap();
        let (x, y) = (rv(&x), rv(&y));
        prop_assume!(!gram(&m, &x, &y).is_zero());
        let (s, b) = sect_split(&m, &x, &y).unwrap();
        prop_assert_eq!(r(4) * sect(&m, &x, &y).unwrap(), s + b);
    }

    #[test]
    fn direct_sums_stay_metrized(s1 in any::<u64>(), s2 in any::<u64>(), k in 0u8..3, d1 in 1usize..=3, d2 in 1usize..=3) {
        let a = random_metrized(s1, d1, kind(k)).unwrap();
        let b = random_metrized(s2, d2, kind(k + 1)).unwrap();
        let sum = compose(ComposeKind::DirectSum, &a, &b).unwrap();
        prop_assert!(sum.is_invariant());
        prop_assert_eq!(sum.dim(), d1 + d2);
    }

    #[test]
    fn random_algebras_satisfy_curvature_identities(seed in any::<u64>(), k in 0u8..3) {
        let m = random_metrized(seed, 3, kind(k)).unwrap();
        let a = m.algebra();
        let (left, right) = diff_bianchi(a);
        prop_assert!(left.passed && right.passed);
        prop_assert!(prepoisson_defect(a).passed);
        if check_identity(a, Identity::Flexible).passed {
            prop_assert!(curvature_self_adjointness(a).is_zero());
        }
    }

    #[test]
    fn constant_sect_matches_sampling(seed in any::<u64>(), k in 0u8..3, dim in 2usize..=3) {
        let m = random_metrized(seed, dim, kind(k)).unwrap();
        let c = constant_sect(&m).unwrap();
        let mut rng = stream_rng(seed, 7);
        let mut values = Vec::new();
        while values.len() < 40 {
            let x: Vec<Rat> = (0..dim).map(|_| r(rand::Rng::random_range(&mut rng, -4..=4))).collect();
            let y: Vec<Rat> = (0..dim).map(|_| r(rand::Rng::random_range(&mut rng, -4..=4))).collect();
            if !gram(&m, &x, &y).is_zero() {
                values.push(sect_oracle(&m, &x, &y));
            }
        }
        match c {
            Some(c) => prop_assert!(values.iter().all(|v| *v == c)),
            None => prop_assert!(values.iter().any(|v| *v != values[0])),
        }
    }

    #[test]
    fn rational_files_round_trip(seed in any::<u64>(), k in 0u8..3, dim in 1usize..=4) {
        let m = alg_lab::algebra::AnyMetrized::Rational(random_metrized(seed, dim, kind(k)).unwrap());
        let text = io::to_json(&m, &Map::new()).to_string();
        let back = io::from_json(&text).unwrap().metrized().unwrap();
        let (a, b) = (m.as_rational().unwrap(), back.as_rational().unwrap());
        prop_assert!(a.algebra() == b.algebra());
        prop_assert_eq!(a.form().rows(), b.form().rows());
    }

    #[test]
    fn float_files_round_trip_bit_exactly(v in prop::collection::vec(-1e6f64..1e6, 8), d in prop::collection::vec(0.1f64..10.0, 2)) {
        let a = Algebra::from_products(2, |i, j| vec![v[(i * 2 + j) * 2], v[(i * 2 + j) * 2 + 1]]).unwrap();
        let m = MetrizedAlgebra::with_form(a, BilinearForm::diagonal(&d)).unwrap();
        let x = [0.3, -1.7];
        let y = [2.1, 0.4];
        let before = alg_lab::sectional::sect_products(&m, &x, &y).unwrap();
        let any = alg_lab::algebra::AnyMetrized::Float(m);
        let text = io::to_json(&any, &Map::new()).to_string();
        let back = io::from_json(&text).unwrap().metrized().unwrap().to_f64();
        prop_assert!(back.algebra() == any.to_f64().algebra());
        let after = alg_lab::sectional::sect_products(&back, &x, &y).unwrap();
        prop_assert_eq!(before.to_bits(), after.to_bits());
    }
}

fn float_sect(m: &MetrizedAlgebra<f64>, x: &[f64], y: &[f64]) -> f64 {
    sect(m, x, y).unwrap()
}

#[test]
fn tensor_of_nonnegative_planes_is_nonnegative() {
    let factors = [presets::herm(2, 0).unwrap().float(), presets::c_epsilon(&r(0)).unwrap().float(), presets::herm(2, 1).unwrap().float()];
    let mut rng = stream_rng(11, 0);
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i..] {
            let t = compose(ComposeKind::TensorProduct, a, b).unwrap();
            for _ in 0..200 {
                let (a1, a1b) = (gaussian(&mut rng, a.dim()), gaussian(&mut rng, a.dim()));
                let (b1, b1b) = (gaussian(&mut rng, b.dim()), gaussian(&mut rng, b.dim()));
                if float_sect(a, &a1, &a1b) < 0.0 || float_sect(b, &b1, &b1b) < 0.0 {
                    continue;
                }
                let x = alg_lab::algebra::tensor_element(&a1, &b1);
                let y = alg_lab::algebra::tensor_element(&a1b, &b1b);
                assert!(float_sect(&t, &x, &y) >= -1e-9);
            }
        }
    }
}

#[test]
fn direct_sum_sect_stays_within_summand_bounds() {
    let cfg = OptimizerConfig { starts: 8, ..Default::default() };
    let pairs = [(presets::herm(2, 0).unwrap().float(), presets::c_epsilon(&r(0)).unwrap().float()), (presets::herm(3, 0).unwrap().float(), presets::herm(2, 1).unwrap().float())];
    for (a, b) in pairs {
        let (ea, eb) = (estimate_extrema(&a, &cfg).unwrap(), estimate_extrema(&b, &cfg).unwrap());
        let lo = ea.bwl.min(eb.bwl).min(0.0) - 1e-6;
        let hi = ea.bwu.max(eb.bwu).max(0.0) + 1e-6;
        let s = compose(ComposeKind::DirectSum, &a, &b).unwrap();
        let samples = alg_lab::sectional::sample_sect(&s, 20_000, 5).unwrap();
        assert!(samples.min >= lo && samples.max <= hi, "[{}, {}] outside [{lo}, {hi}]", samples.min, samples.max);
    }
}

fn rational_battery() -> Vec<(String, MetrizedAlgebra<Rat>)> {
    let addrs = [
        "hurwitz:0", "hurwitz:1", "hurwitz:2", "hurwitz:3", "para_hurwitz:1", "para_hurwitz:2", "cross:3", "cross:7",
        "imo_commutator", "herm:2:0", "herm:3:0", "herm:2:1", "c_epsilon:3/10", "e_algebra:4", "kosier",
        "sl2_kosier_bracket", "r3_star", "so3_killing", "two_step_double", "matrix_lie:2:0", "so:4",
    ];
    addrs
        .iter()
        .map(|a| {
            let p = presets::from_address(a).unwrap();
            (a.to_string(), p.rational().unwrap().clone())
        })
        .collect()
}

#[test]
fn rational_presets_are_invariant_exactly() {
    for (name, m) in rational_battery() {
        let rep = m.report();
        assert!(rep.nondegenerate, "{name}");
        // the norm form of a Hurwitz algebra and the Frobenius form on gl(n) are not invariant
        if name.starts_with("hurwitz") || name.starts_with("matrix_lie") {
            continue;
        }
        assert!(rep.invariant && rep.max_defect == 0.0, "{name}: {}", rep.max_defect);
    }
}

/// Flexible and associator-cyclic iff every `A(x) = L(x) − R(x)` is a derivation, and both
/// imply `ℛ = ℛ̄`. The converse fails: a flexible algebra always has `ℛ = ℛ̄`, and the
/// octonions are flexible without being associator-cyclic or Lie-admissible.
#[test]
fn curvature_symmetry_criteria_agree_on_presets() {
    let mut self_adjoint_only = Vec::new();
    for (name, m) in rational_battery() {
        let a = m.algebra();
        if a.dim() > 10 {
            continue;
        }
        let flexible = check_identity(a, Identity::Flexible).passed;
        let cyclic = check_identity(a, Identity::AssociatorCyclic).passed;
        let derivation = check_identity(a, Identity::CommutatorDerivation).passed;
        let self_adjoint = check_identity(a, Identity::SelfAdjointCurvature).passed;
        assert_eq!(flexible && cyclic, derivation, "{name}");
        assert!(!derivation || self_adjoint, "{name}");
        assert!(!flexible || self_adjoint, "{name}");
        if self_adjoint && !derivation {
            assert!(flexible && !check_identity(a, Identity::LieAdmissible).passed, "{name}");
            self_adjoint_only.push(name);
        }
    }
    eprintln!("self-adjoint curvature without derivations: {self_adjoint_only:?}");
    assert!(self_adjoint_only.contains(&"hurwitz:3".to_string()));
}

#[test]
fn antiflexible_algebras_have_vanishing_at() {
    for name in ["kosier", "r3_star"] {
        let p = presets::from_address(name).unwrap();
        let a = p.rational().unwrap().algebra().clone();
        assert!(check_identity(&a, Identity::Antiflexible).passed, "{name}");
        let n = a.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let e = |t| linalg::basis::<Rat>(n, t);
                    assert!(at_tensor(&a, &e(i), &e(j), &e(k)).unwrap().iter().all(Zero::is_zero));
                }
            }
        }
    }
}

#[test]
fn square_zero_planes_have_nonpositive_sect() {
    let p = presets::c_epsilon(&Rat::one()).unwrap();
    let m = p.float();
    let zs = special::find_square_zero(&p.metrized, &SearchConfig { seed: 3, ..Default::default() }).unwrap();
    assert!(!zs.is_empty());
    let mut rng = stream_rng(3, 9);
    for z in &zs.elements {
        for _ in 0..200 {
            let y = gaussian(&mut rng, 3);
            let s = float_sect(&m, &z.coords, &y);
            assert!(s <= 1e-9, "{s}");
            let zy = linalg::norm2(&m.mul(&z.coords, &y));
            assert_eq!(s.abs() <= 1e-9, zy <= 1e-6, "sect {s}, |z•y| {zy}");
        }
    }
}

#[test]
fn nonpositive_sect_excludes_interior_spectrum() {
    for n in 4..=5 {
        let p = presets::e_algebra(n).unwrap();
        let m = p.float();
        let ids = special::find_idempotents(&p.metrized, &SearchConfig { starts: 64, seed: 2, ..Default::default() }).unwrap();
        assert!(!ids.is_empty());
        for e in &ids.elements {
            let sp = special::orthogonal_spectrum(&m, &e.coords).unwrap();
            assert!(sp.values.iter().all(|v| *v <= 1e-6 || *v >= 1.0 - 1e-6), "{:?}", sp.values);
        }
    }
}

#[test]
fn derived_products_keep_the_metric() {
    for (name, m) in rational_battery() {
        if !m.is_invariant() {
            continue;
        }
        for kind in [DerivedKind::Symmetrized, DerivedKind::Bracket] {
            assert!(m.derived(kind).unwrap().is_invariant(), "{name} {kind:?}");
        }
    }
}
