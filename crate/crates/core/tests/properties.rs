//! Invariants checked on random inputs.

use almell::decision::{DecisionOptions, Verdict};
use almell::ellipticity::{self, SemidirectGroup};
use almell::gallery;
use almell::nalgebra::{DMatrix, DVector};
use almell::{AlgebraAutomorphism, CompactPart, GroupPresentation, LieAlgebra, Parallelism, SolvablePresentation, TorusRep};
use proptest::prelude::*;

fn matrix(n: usize, range: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-range..range, n * n).prop_map(move |v| DMatrix::from_row_slice(n, n, &v))
}

/// Identity plus a bounded perturbation, kept well away from singular.
fn invertible(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, 0.4).prop_filter("well conditioned", |m| {
        let p = DMatrix::identity(m.nrows(), m.nrows()) + m;
        let s = p.singular_values();
        s.min() > 0.3 && s.max() / s.min() < 10.0
    })
    .prop_map(|m| DMatrix::identity(m.nrows(), m.nrows()) + m)
}

fn orthogonal(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, 1.0)
        .prop_filter("nonsingular", |m| m.singular_values().min() > 1e-3)
        .prop_map(|m| m.qr().q())
}

fn vector(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-2.0..2.0, n).prop_map(DVector::from_vec)
}

fn algebras() -> Vec<LieAlgebra> {
    vec![
        LieAlgebra::heisenberg(),
        LieAlgebra::su2(),
        LieAlgebra::sl2r(),
        LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1)),
    ]
}

fn algebra_and_basis() -> impl Strategy<Value = (LieAlgebra, DMatrix<f64>)> {
    (0..4usize).prop_flat_map(|i| {
        let a = algebras().swap_remove(i);
        let n = a.dim();
        (Just(a), invertible(n))
    })
}

fn opts(samples: usize) -> DecisionOptions {
    DecisionOptions {
        samples,
        ..DecisionOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_change_keeps_the_bracket_valid((a, p) in algebra_and_basis(), x in vector(4), y in vector(4)) {
        let b = a.change_basis(&p).unwrap();
        let report = b.validate();
        prop_assert!(report.accepted, "{report:?}");
        let n = a.dim();
        let (x, y) = (x.rows(0, n).into_owned(), y.rows(0, n).into_owned());
        let xy = b.bracket(&x, &y).unwrap();
        let yx = b.bracket(&y, &x).unwrap();
        prop_assert!((xy + yx).amax() <= 1e-10);
    }

    #[test]
    fn basis_change_keeps_structure((a, p) in algebra_and_basis()) {
        let b = a.change_basis(&p).unwrap();
        prop_assert_eq!(a.derived_series().unwrap().dims(), b.derived_series().unwrap().dims());
        prop_assert_eq!(a.killing_form().signature(), b.killing_form().signature());
        prop_assert_eq!(a.radical().unwrap().dim(), b.radical().unwrap().dim());
    }

    #[test]
    fn killing_form_is_ad_invariant((a, p) in algebra_and_basis(), x in vector(4), y in vector(4), z in vector(4)) {
        let b = a.change_basis(&p).unwrap();
        let n = b.dim();
        let (x, y, z) = (x.rows(0, n).into_owned(), y.rows(0, n).into_owned(), z.rows(0, n).into_owned());
        let k = b.killing_form();
        let lhs = k.eval(&b.bracket(&x, &y).unwrap(), &z);
        let rhs = -k.eval(&y, &b.bracket(&x, &z).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn weights_survive_orthogonal_conjugation(
        planes in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 1..4),
        lines in 0usize..2,
        q in orthogonal(8),
    ) {
        let rep = TorusRep::from_blocks(2, &planes, lines).unwrap();
        let n = rep.dim();
        let q = q.view((0, 0), (n, n)).into_owned().qr().q();
        let moved = rep.conjugated(&q).unwrap();
        prop_assert_eq!(rep.weights().unwrap(), moved.weights().unwrap());
        prop_assert_eq!(rep.fixed_dim().unwrap(), moved.fixed_dim().unwrap());
    }

    #[test]
    fn rho_is_periodic(
        planes in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 1..4),
        t in prop::collection::vec(0.0..1.0f64, 2),
        shift in prop::collection::vec(-3i64..=3, 2),
    ) {
        let rep = TorusRep::from_blocks(2, &planes, 0).unwrap();
        let moved: Vec<f64> = t.iter().zip(&shift).map(|(a, &s)| a + s as f64).collect();
        let diff = rep.rho(&t).unwrap() - rep.rho(&moved).unwrap();
        prop_assert!(diff.amax() <= 1e-9);
    }

    #[test]
    fn heisenberg_product_is_associative(a in vector(3), b in vector(3), c in vector(3)) {
        let p = SolvablePresentation::heisenberg();
        let (a, b, c) = (p.element(a).unwrap(), p.element(b).unwrap(), p.element(c).unwrap());
        let left = p.multiply(&p.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = p.multiply(&a, &p.multiply(&b, &c).unwrap()).unwrap();
        prop_assert!((left.matrix() - right.matrix()).amax() <= 1e-10);
        let inv = p.inverse(&a).unwrap();
        let one = p.multiply(&a, &inv).unwrap();
        prop_assert!((one.matrix() - DMatrix::identity(3, 3)).amax() <= 1e-10);
    }

    #[test]
    fn delta_solve_recovers_delta(angle in 0.3..6.0f64, r in 0.3..0.8f64, c in vector(2), s in vector(3)) {
        // scaled rotation on the top layer, so the center is scaled by r² ≠ 1
        let (co, si) = (r * angle.cos(), r * angle.sin());
        let phi = AlgebraAutomorphism::new(DMatrix::from_row_slice(
            3, 3, &[co, -si, 0.0, si, co, 0.0, c[0], c[1], r * r],
        )).unwrap();
        let p = SolvablePresentation::heisenberg();
        let s = p.element(s).unwrap();
        let target = p.delta(&phi, &s).unwrap();
        let sol = p.delta_solve(&phi, &target).unwrap();
        let back = p.delta(&phi, &sol.x).unwrap();
        prop_assert!((back.matrix() - target.matrix()).norm() <= 1e-9 * target.matrix().norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn density_does_not_depend_on_workers(seed in any::<u64>(), workers in 2usize..6) {
        let k = gallery::presentation("mixed3").unwrap().compact;
        let one = k.torus.fr_density_estimate(500, seed, Parallelism::with_workers(1)).unwrap();
        let many = k.torus.fr_density_estimate(500, seed, Parallelism::with_workers(workers)).unwrap();
        prop_assert_eq!(one, many);
        let group = SemidirectGroup::Vector(&k);
        let one = ellipticity::elliptic_density(group, 500, seed, 1.0, Parallelism::with_workers(1)).unwrap();
        let many = ellipticity::elliptic_density(group, 500, seed, 1.0, Parallelism::with_workers(workers)).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn verdict_survives_basis_change(i in 0usize..2, p in invertible(7)) {
        let name = ["su2_r4", "e2_euclid"][i];
        let g = gallery::presentation(name).unwrap();
        let n = g.acted_dim();
        let p = DMatrix::identity(n, n) + (p.view((0, 0), (n, n)) - DMatrix::identity(n, n)) * 0.5;
        let before = g.decide(&opts(200)).unwrap().verdict;
        let after = g.change_basis(&p).unwrap().decide(&opts(200)).unwrap().verdict;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn verdict_survives_torus_reparameterization(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3) {
        // unimodular: upper triangular with unit diagonal, then a swap of the first two rows
        let m = vec![vec![0, 1, b], vec![1, a, c], vec![0, 0, 1]];
        for name in ["mixed3", "rot2"] {
            let g = gallery::presentation(name).unwrap();
            let rank = g.compact.torus.rank();
            let m: Vec<Vec<i64>> = if rank == 3 { m.clone() } else { vec![vec![1]] };
            let before = g.decide(&opts(200)).unwrap().verdict;
            let after = g.reparameterize_torus(&m).unwrap().decide(&opts(200)).unwrap().verdict;
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn density_ignores_translation_scale(seed in any::<u64>()) {
        for name in ["rot2", "triv_line", "mixed3"] {
            let k = gallery::presentation(name).unwrap().compact;
            let group = SemidirectGroup::Vector(&k);
            let small = ellipticity::elliptic_density(group, 300, seed, 0.1, Parallelism::default()).unwrap();
            let large = ellipticity::elliptic_density(group, 300, seed, 10.0, Parallelism::default()).unwrap();
            prop_assert_eq!(small.hits, large.hits, "{}", name);
        }
    }
}

#[test]
fn general_and_solvable_routes_agree() {
    let rot = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let general = GroupPresentation::general(LieAlgebra::heisenberg(), TorusRep::new(1, 3, vec![rot]).unwrap());
    let solvable = gallery::presentation("heis_rot").unwrap();
    let g = general.decide(&opts(1000)).unwrap();
    let s = solvable.decide(&opts(1000)).unwrap();
    assert_eq!(g.verdict, Verdict::NotAlmostElliptic);
    assert_eq!(g.verdict, s.verdict);

    let complex = gallery::presentation("heis_rot_complex").unwrap();
    let s = complex.decide(&opts(1000)).unwrap();
    let algebra = complex.solvable_presentation().unwrap().algebra().clone();
    let derivation = complex.compact.torus.clone();
    let g = GroupPresentation::general(algebra, derivation).decide(&opts(1000)).unwrap();
    assert_eq!(s.verdict, Verdict::OpenlyAlmostElliptic);
    assert_eq!(g.verdict, s.verdict);
}

#[test]
fn trivial_compact_part_has_no_free_elements() {
    let k = CompactPart::connected(TorusRep::trivial(3));
    let d = ellipticity::elliptic_density(SemidirectGroup::Vector(&k), 200, 0, 1.0, Parallelism::default()).unwrap();
    assert_eq!(d.hits, 0);
}
