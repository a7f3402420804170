use std::hint::black_box;

use almell::ellipticity::{self, SemidirectGroup};
use almell::gallery;
use almell::nalgebra::{DMatrix, DVector};
use almell::{AlgebraAutomorphism, Parallelism, SolvablePresentation, TorusRep};
use criterion::{criterion_group, criterion_main, Criterion};

fn weights(c: &mut Criterion) {
    let rep = TorusRep::from_blocks(3, &[vec![1, 0, 2], vec![0, 1, -1], vec![3, -2, 0]], 1).unwrap();
    let q = DMatrix::from_fn(7, 7, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 6.0 } else { 0.0 })
        .qr()
        .q();
    let rep = rep.conjugated(&q).unwrap();
    c.bench_function("weights rank 3 on R^7", |b| b.iter(|| black_box(&rep).weights().unwrap()));
}

fn delta_solve(c: &mut Criterion) {
    let p = SolvablePresentation::heisenberg();
    let phi = AlgebraAutomorphism::new(DMatrix::from_row_slice(3, 3, &[0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.3, -0.2, 0.25]))
        .unwrap();
    let v = p.element(DVector::from_vec(vec![1.5, -0.7, 2.0])).unwrap();
    c.bench_function("delta solve heisenberg", |b| b.iter(|| p.delta_solve(&phi, black_box(&v)).unwrap()));
}

fn density(c: &mut Criterion) {
    let k = gallery::presentation("mixed3").unwrap().compact;
    let mut group = c.benchmark_group("elliptic density mixed3");
    group.sample_size(10);
    for (label, par) in [("sequential", Parallelism::sequential()), ("parallel", Parallelism::default())] {
        group.bench_function(label, |b| {
            b.iter(|| ellipticity::elliptic_density(SemidirectGroup::Vector(&k), 2000, 0, 1.0, par).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, weights, delta_solve, density);
criterion_main!(benches);
