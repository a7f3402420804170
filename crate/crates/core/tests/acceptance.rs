//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p almell-core --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use almell::decision::{DecisionOptions, Verdict};
use almell::ellipticity::{self, SemidirectElement, SemidirectGroup};
use almell::gallery::{self, TiltFamily};
use almell::linalg::C64;
use almell::nalgebra::{DMatrix, DVector};
use almell::solvable_group::SolvablePresentation;
use almell::{AlgebraAutomorphism, CompactPart, Error, GroupPresentation, LieAlgebra, Parallelism, Subspace, TorusRep};
use num::rational::Ratio;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn opts() -> DecisionOptions {
    DecisionOptions {
        samples: 10_000,
        seed: 0,
        ..DecisionOptions::default()
    }
}

// ---------------------------------------------------------------------------
// 1. weight criterion against sampled density
// ---------------------------------------------------------------------------

fn density_entry(name: &str, verdict: Verdict, fraction: f64) -> Result<Duration, String> {
    let start = Instant::now();
    let g = gallery::presentation(name).map_err(err)?;
    let r = g.decide_vector_by_compact(&opts()).map_err(err)?;
    ensure(r.verdict == verdict, || format!("{name}: verdict {:?}", r.verdict))?;
    let d = ellipticity::elliptic_density(SemidirectGroup::Vector(&g.compact), 10_000, 0, 1.0, Parallelism::default())
        .map_err(err)?;
    ensure(d.fraction == fraction && d.undetermined == 0, || {
        format!("{name}: density {} with {} undetermined", d.fraction, d.undetermined)
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(10), || format!("{name}: took {elapsed:?}"))?;
    Ok(elapsed)
}

fn criterion_1() -> Outcome {
    let mut times = Vec::new();
    times.push(density_entry("rot2", Verdict::OpenlyAlmostElliptic, 1.0)?);
    times.push(density_entry("triv_line", Verdict::NotAlmostElliptic, 0.0)?);
    times.push(density_entry("mixed3", Verdict::NotAlmostElliptic, 0.0)?);
    Ok(format!("rot2 1.0, triv_line 0.0, mixed3 0.0; times {times:?}"))
}

// ---------------------------------------------------------------------------
// 2. randomized equivalence battery
// ---------------------------------------------------------------------------

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    m.qr().q()
}

/// Random rep with planes carrying weights in {−3..3}^r; with `forced_zero`
/// one plane or line carries the zero weight, otherwise every weight is nonzero.
fn random_rep(rng: &mut ChaCha8Rng, forced_zero: bool) -> (TorusRep, Vec<Vec<i64>>, usize) {
    let r = rng.random_range(1..=3);
    let planes_count = rng.random_range(1..=if forced_zero { 3 } else { 4 });
    let mut planes: Vec<Vec<i64>> = (0..planes_count)
        .map(|_| loop {
            let w: Vec<i64> = (0..r).map(|_| rng.random_range(-3..=3)).collect();
            if w.iter().any(|&x| x != 0) {
                break w;
            }
        })
        .collect();
    let mut lines = 0;
    if forced_zero {
        if rng.random::<bool>() {
            lines = 1;
        } else {
            planes.push(vec![0; r]);
        }
    }
    let rep = TorusRep::from_blocks(r, &planes, lines).expect("block rep");
    let q = random_orthogonal(rep.dim(), rng);
    (rep.conjugated(&q).expect("orthogonal"), planes, lines)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut positives = 0;
    for case in 0..50 {
        let forced_zero = case % 2 == 1;
        let (rep, planes, lines) = random_rep(&mut rng, forced_zero);
        ensure(rep.dim() <= 8, || format!("case {case}: dimension {}", rep.dim()))?;
        let g = GroupPresentation::vector(CompactPart::connected(rep));
        let b = g
            .equivalence_battery(&DecisionOptions {
                seed: case,
                ..opts()
            })
            .map_err(|e| format!("case {case} (planes {planes:?}, lines {lines}): {e}"))?;
        ensure(b.conditions.len() == 7, || format!("case {case}: {} conditions", b.conditions.len()))?;
        ensure(b.value == !forced_zero, || {
            format!("case {case} (planes {planes:?}, lines {lines}): battery says {}", b.value)
        })?;
        positives += b.value as usize;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("50 reps, {positives} trivial-weight-free, all seven conditions equal; {elapsed:?}"))
}

// ---------------------------------------------------------------------------
// 3. δ-solver soundness and the twisted identity
// ---------------------------------------------------------------------------

fn random_heisenberg_automorphism(rng: &mut ChaCha8Rng) -> AlgebraAutomorphism {
    loop {
        let a: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let det = a[0] * a[3] - a[1] * a[2];
        let c: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let phi = DMatrix::from_row_slice(3, 3, &[a[0], a[1], 0.0, a[2], a[3], 0.0, c[0], c[1], det]);
        let shifted = DMatrix::identity(3, 3) - &phi;
        let sigma_min = shifted.singular_values().min();
        if sigma_min >= 0.1 && det.abs() > 0.1 {
            return AlgebraAutomorphism::new(phi).expect("square");
        }
    }
}

fn random_element(p: &SolvablePresentation, rng: &mut ChaCha8Rng) -> almell::GroupElement {
    let coords = DVector::from_fn(p.dim(), |_, _| rng.random::<f64>() * 4.0 - 2.0);
    p.element(coords).expect("coordinates")
}

fn criterion_3() -> Outcome {
    let p = SolvablePresentation::heisenberg();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_residual: f64 = 0.0;
    let mut worst_twist: f64 = 0.0;
    for _ in 0..20 {
        let phi = random_heisenberg_automorphism(&mut rng);
        let check = p.check_automorphism(&phi).map_err(err)?;
        ensure(check.accepted, || format!("automorphism rejected: {check:?}"))?;
        for _ in 0..100 {
            let v = random_element(&p, &mut rng);
            let s = p.delta_solve(&phi, &v).map_err(err)?;
            // residual recomputed from scratch: ‖x⁻¹ φ(x) − v‖_F on matrices
            let x = &s.x;
            let phi_x = p.apply_automorphism(&phi, x).map_err(err)?;
            let lhs = x.matrix().clone().try_inverse().expect("unipotent") * phi_x.matrix();
            let residual = (lhs - v.matrix()).norm();
            worst_residual = worst_residual.max(residual);
        }
    }
    let phi = random_heisenberg_automorphism(&mut rng);
    for _ in 0..100 {
        let a = random_element(&p, &mut rng);
        let s = random_element(&p, &mut rng);
        let left = p.delta(&phi, &p.multiply(&a, &s).map_err(err)?).map_err(err)?;
        let s_inv = s.matrix().clone().try_inverse().expect("unipotent");
        let da = p.delta(&phi, &a).map_err(err)?;
        let ds = p.delta(&phi, &s).map_err(err)?;
        let right = &s_inv * da.matrix() * s.matrix() * ds.matrix();
        worst_twist = worst_twist.max((left.matrix() - right).amax());
    }
    ensure(worst_residual <= 1e-9, || format!("worst δ residual {worst_residual:e}"))?;
    ensure(worst_twist <= 1e-8, || format!("worst twisted-identity error {worst_twist:e}"))?;
    Ok(format!(
        "2000 solves, worst residual {worst_residual:.1e}; 100 pairs, worst twist {worst_twist:.1e}"
    ))
}

// ---------------------------------------------------------------------------
// 4. connectedness counterexample
// ---------------------------------------------------------------------------

fn criterion_4() -> Outcome {
    let g = gallery::presentation("z2inv").map_err(err)?;
    ensure(!g.compact.torus.has_trivial_weight().map_err(err)?, || "torus action has a trivial weight".into())?;
    match g.decide_vector_by_compact(&opts()) {
        Err(Error::DisconnectedCompactPart { .. }) => {}
        other => return Err(format!("decision did not refuse: {other:?}")),
    }
    // the reflection σ = diag(1, −1) fixes v = (1, 0)
    let sigma = &g.compact.components[0];
    let v = DVector::from_vec(vec![1.0, 0.0]);
    ensure((sigma * &v - &v).norm() == 0.0, || "v is not fixed by σ".into())?;
    let center = SemidirectElement::new(vec![1.0, 0.0], vec![0.0], Some(0)).map_err(err)?;
    let d = ellipticity::local_elliptic_density(
        SemidirectGroup::Vector(&g.compact),
        &center,
        0.01,
        10_000,
        0,
        Parallelism::default(),
    )
    .map_err(err)?;
    ensure(d.fraction == 0.0 && d.undetermined == 0, || {
        format!("local density {} with {} undetermined", d.fraction, d.undetermined)
    })?;
    Ok("trivial-weight-free torus, decision refused, local density 0.0 at (v, σ)".into())
}

// ---------------------------------------------------------------------------
// 5. power norms along the tilting family
// ---------------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let family: TiltFamily = serde_json::from_str(gallery::source("un_gl").map_err(err)?).map_err(|e| e.to_string())?;
    ensure(family.tilts.len() == 5 && family.thetas == [0.1, 0.01, 0.001], || "unexpected family".into())?;
    let rows = family.evaluate(10_000).map_err(err)?;
    for row in &rows {
        let lambda = C64::from_polar(1.0, 2.0 * PI * row.theta);
        // independent closed form: t^k − 1 = (λ^k − 1)/ε · u e_nᵀ, of norm |λ^k − 1|·‖u‖/ε
        let best = (1..=10_000).map(|k| (lambda.powu(k) - 1.0).norm()).fold(0.0, f64::max);
        for (eps, sup) in family.tilts.iter().zip(&row.sup_norms) {
            let expected = best * (1.0 + eps * eps).sqrt() / eps;
            ensure((sup - expected).abs() <= 1e-8 * expected, || {
                format!("theta {}, tilt {eps}: {sup} vs closed form {expected}", row.theta)
            })?;
            ensure(*sup >= 3f64.sqrt() - 1e-9, || format!("theta {}, tilt {eps}: sup {sup}", row.theta))?;
        }
        ensure(row.sup_norms.windows(2).all(|w| w[1] > w[0]), || {
            format!("theta {}: not increasing {:?}", row.theta, row.sup_norms)
        })?;
    }
    Ok(format!(
        "all sups ≥ √3, increasing; largest {:.3}",
        rows.iter().flat_map(|r| r.sup_norms.iter().cloned()).fold(0.0, f64::max)
    ))
}

// ---------------------------------------------------------------------------
// 6. structure oracles against an exact brute-force implementation
// ---------------------------------------------------------------------------

type Q = Ratio<i64>;

/// Structure constants over Q, dense.
struct ExactAlgebra {
    n: usize,
    c: Vec<Vec<Vec<Q>>>,
}

impl ExactAlgebra {
    fn new(n: usize, triples: &[(usize, usize, usize, i64)]) -> Self {
        let mut c = vec![vec![vec![Q::zero(); n]; n]; n];
        for &(i, j, k, v) in triples {
            c[i][j][k] = Q::from_integer(v);
            c[j][i][k] = Q::from_integer(-v);
        }
        ExactAlgebra { n, c }
    }

    fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut z = vec![Q::zero(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let xy = x[i] * y[j];
                if xy.is_zero() {
                    continue;
                }
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk += xy * self.c[i][j][k];
                }
            }
        }
        z
    }

    fn derived_dims(&self) -> (Vec<usize>, bool) {
        let mut basis = unit_vectors(self.n);
        let mut dims = vec![basis.len()];
        loop {
            let mut brackets = Vec::new();
            for x in &basis {
                for y in &basis {
                    brackets.push(self.bracket(x, y));
                }
            }
            let next = row_basis(brackets);
            dims.push(next.len());
            if next.len() == basis.len() {
                return (dims, false);
            }
            if next.is_empty() {
                return (dims, true);
            }
            basis = next;
        }
    }

    fn ad(&self, i: usize) -> Vec<Vec<Q>> {
        // (ad e_i)[k][j] = c[i][j][k]
        (0..self.n).map(|k| (0..self.n).map(|j| self.c[i][j][k]).collect()).collect()
    }

    fn killing(&self) -> Vec<Vec<Q>> {
        let ads: Vec<_> = (0..self.n).map(|i| self.ad(i)).collect();
        let mut k = vec![vec![Q::zero(); self.n]; self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                let mut tr = Q::zero();
                for p in 0..self.n {
                    for q in 0..self.n {
                        tr += ads[a][p][q] * ads[b][q][p];
                    }
                }
                k[a][b] = tr;
            }
        }
        k
    }

    /// `{x : K(x, [g, g]) = 0}`, as a row basis.
    fn radical(&self) -> Vec<Vec<Q>> {
        let e = unit_vectors(self.n);
        let mut brackets = Vec::new();
        for x in &e {
            for y in &e {
                brackets.push(self.bracket(x, y));
            }
        }
        let derived = row_basis(brackets);
        let k = self.killing();
        let constraints: Vec<Vec<Q>> = derived
            .iter()
            .map(|d| (0..self.n).map(|a| (0..self.n).map(|b| k[a][b] * d[b]).sum()).collect())
            .collect();
        null_space(constraints, self.n)
    }
}

fn unit_vectors(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

fn rref(mut rows: Vec<Vec<Q>>) -> (Vec<Vec<Q>>, Vec<usize>) {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c];
                let pivot_row = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

fn row_basis(rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    rref(rows).0
}

fn null_space(rows: Vec<Vec<Q>>, n: usize) -> Vec<Vec<Q>> {
    let (r, pivots) = rref(rows);
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); n];
            v[free] = Q::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[free];
            }
            v
        })
        .collect()
}

/// Negative definiteness by leading principal minors (Sylvester).
fn negative_definite(k: &[Vec<Q>]) -> bool {
    (1..=k.len()).all(|m| {
        let minor: Vec<Vec<Q>> = k[..m].iter().map(|r| r[..m].to_vec()).collect();
        let d = det(minor);
        if m % 2 == 1 {
            d.is_negative()
        } else {
            d.is_positive()
        }
    })
}

fn det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in (c + 1)..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let v = a[c][j];
                a[i][j] -= f * v;
            }
        }
    }
    d
}

fn to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn criterion_6() -> Outcome {
    let heis_t = [(0, 1, 2, 1)];
    let su2_t = [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)];
    let sl2_t = [(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)];
    let float = |n: usize, t: &[(usize, usize, usize, i64)]| {
        LieAlgebra::from_triples(n, &t.iter().map(|&(i, j, k, v)| (i, j, k, v as f64)).collect::<Vec<_>>())
            .expect("constants")
    };

    let heis = ExactAlgebra::new(3, &heis_t);
    let (dims, solvable) = heis.derived_dims();
    ensure(dims == [3, 1, 0] && solvable, || format!("oracle Heisenberg dims {dims:?}"))?;
    let s = float(3, &heis_t).derived_series().map_err(err)?;
    ensure(s.dims() == dims && s.solvable, || format!("Heisenberg dims {:?}", s.dims()))?;

    let sl2 = ExactAlgebra::new(3, &sl2_t);
    let (dims, solvable) = sl2.derived_dims();
    ensure(dims == [3, 3] && !solvable, || format!("oracle sl2 dims {dims:?}"))?;
    let s = float(3, &sl2_t).derived_series().map_err(err)?;
    ensure(s.dims() == dims && !s.solvable, || format!("sl2 dims {:?}", s.dims()))?;

    let su2 = ExactAlgebra::new(3, &su2_t);
    let k_exact = su2.killing();
    let k = float(3, &su2_t).killing_form();
    let mut dev: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let expected = if a == b { -2.0 } else { 0.0 };
            ensure(to_f64(&k_exact[a][b]) == expected, || "oracle su2 Killing form".into())?;
            dev = dev.max((k.matrix[(a, b)] - expected).abs());
        }
    }
    ensure(dev <= 1e-10, || format!("su2 Killing deviation {dev:e}"))?;

    ensure(negative_definite(&k_exact), || "oracle: su2 not compact".into())?;
    ensure(!negative_definite(&sl2.killing()), || "oracle: sl2 compact".into())?;
    ensure(float(3, &su2_t).is_compact_type().map_err(err)?, || "su2 not compact".into())?;
    ensure(!float(3, &sl2_t).is_compact_type().map_err(err)?, || "sl2 compact".into())?;

    // su(2) ⊕ R, the line as basis vector 3
    let sum = ExactAlgebra::new(4, &su2_t);
    let rad_exact = sum.radical();
    ensure(rad_exact.len() == 1, || format!("oracle radical dim {}", rad_exact.len()))?;
    let line: Vec<f64> = rad_exact[0].iter().map(to_f64).collect();
    ensure(line == [0.0, 0.0, 0.0, 1.0], || format!("oracle radical {line:?}"))?;
    let rad = LieAlgebra::direct_sum(&LieAlgebra::su2(), &LieAlgebra::abelian(1)).radical().map_err(err)?;
    let expected = Subspace::from_vectors(4, &[line]).map_err(err)?;
    ensure(rad.dim() == 1 && rad.contains(&expected, 1e-10), || format!("radical {:?}", rad.basis_vectors()))?;
    Ok("derived series, Killing form, compact type and radical match the exact oracle".into())
}

// ---------------------------------------------------------------------------
// 7. general decisions and permanence
// ---------------------------------------------------------------------------

fn verdict_of(name: &str) -> Result<Verdict, String> {
    Ok(gallery::presentation(name).map_err(err)?.decide(&opts()).map_err(err)?.verdict)
}

fn criterion_7() -> Outcome {
    for (name, expected) in [
        ("e2_cover", Verdict::NotAlmostElliptic),
        ("su2", Verdict::OpenlyAlmostElliptic),
        ("sl2r", Verdict::NotAlmostElliptic),
    ] {
        let v = verdict_of(name)?;
        ensure(v == expected, || format!("{name}: {v:?}"))?;
    }
    // layer-wise analysis by hand: the rotation restricted to (x, y) and to z
    let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let top = TorusRep::new(1, 2, vec![rot]).map_err(err)?;
    let center = TorusRep::new(1, 1, vec![DMatrix::zeros(1, 1)]).map_err(err)?;
    let predicted = !top.has_trivial_weight().map_err(err)? && !center.has_trivial_weight().map_err(err)?;
    let v = verdict_of("heis_rot")?;
    ensure(v == Verdict::from_bool(predicted), || format!("heis_rot: {v:?}, layers predict {predicted}"))?;
    // complex variant: weights ±1 on x and y, ±2 on z
    let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let top = TorusRep::new(1, 4, vec![DMatrix::from_fn(4, 4, |r, c| if r / 2 == c / 2 { j[(r % 2, c % 2)] } else { 0.0 })])
        .map_err(err)?;
    let center = TorusRep::new(1, 2, vec![&j * 2.0]).map_err(err)?;
    let predicted = !top.has_trivial_weight().map_err(err)? && !center.has_trivial_weight().map_err(err)?;
    let v = verdict_of("heis_rot_complex")?;
    ensure(v == Verdict::from_bool(predicted), || format!("heis_rot_complex: {v:?}, layers predict {predicted}"))?;

    for (name, layer) in [("heis_rot", 1), ("heis_rot_complex", 1), ("su2_r4", 0)] {
        let p = gallery::presentation(name)
            .map_err(err)?
            .permanence_check(layer, &opts())
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(p.consistent, || format!("{name}: {p:?}"))?;
    }
    Ok("e2_cover not, su2 openly, sl2r not; heis_rot matches layers; permanence holds".into())
}

// ---------------------------------------------------------------------------
// 8. determinism
// ---------------------------------------------------------------------------

fn criterion_8() -> Outcome {
    let run = |parallelism: Parallelism| -> Result<String, String> {
        let r = gallery::run(
            None,
            &DecisionOptions {
                parallelism,
                ..opts()
            },
        )
        .map_err(err)?;
        ensure(r.passed, || "gallery checks failed".into())?;
        Ok(serde_json::to_string_pretty(&r).expect("serializable"))
    };
    let first = run(Parallelism::default())?;
    let second = run(Parallelism::default())?;
    ensure(first == second, || "two runs differ".into())?;
    let one = run(Parallelism::with_workers(1))?;
    let three = run(Parallelism::with_workers(3))?;
    ensure(first == one && one == three, || "worker count changes the report".into())?;
    Ok(format!("gallery report {} bytes, identical across runs and worker counts", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("weight criterion matches elliptic density", criterion_1),
        ("randomized equivalence battery", criterion_2),
        ("delta solver soundness", criterion_3),
        ("connectedness counterexample", criterion_4),
        ("power-norm divergence", criterion_5),
        ("structure oracles", criterion_6),
        ("general decisions and permanence", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
