use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use phasepure::fock::StateSpec;
use phasepure::numerics::ComplexMatrix;
use phasepure::povm::{
    check_positivity_with, density_on_grid, sample_outcomes_with, TrigMatrixDensity,
};
use phasepure::Exec;

const MODES: [(&str, Exec); 2] = [
    ("parallel", Exec::Parallel),
    ("sequential", Exec::Sequential),
];

// Non-scalar band-2 density: C_0 = I, C_1 = 0.2·shift, C_2 = 0.1·shift²,
// so positivity needs one eigendecomposition per grid point.
fn matrix_density(l: usize) -> TrigMatrixDensity {
    let shift = |k: usize, w: f64| {
        ComplexMatrix::from_fn(l, l, |i, j| {
            if j == i + k {
                Complex64::new(w, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    TrigMatrixDensity::from_coefficients(
        l,
        BTreeMap::from([
            (0, ComplexMatrix::identity(l)),
            (1, shift(1, 0.2)),
            (2, shift(2, 0.1)),
        ]),
    )
    .expect("valid coefficients")
}

fn positivity(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_positivity");
    group.sample_size(20);
    for l in [8, 16, 32] {
        let d = matrix_density(l);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, l), &d, |b, d| {
                b.iter(|| check_positivity_with(black_box(d), 1024, 1e-10, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn distribution(c: &mut Criterion) {
    let mut group = c.benchmark_group("density_on_grid");
    let l = 32;
    let d = matrix_density(l);
    let rho = StateSpec::Coherent(Complex64::new(2.0, 0.0))
        .density(l)
        .unwrap();
    for grid in [1024, 8192] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, grid), &grid, |b, &grid| {
                b.iter(|| density_on_grid(black_box(&d), &rho, grid, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_outcomes");
    group.sample_size(20);
    let l = 32;
    let d = matrix_density(l);
    let rho = StateSpec::Coherent(Complex64::new(2.0, 0.0))
        .density(l)
        .unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| sample_outcomes_with(black_box(&d), &rho, 10_000, 7, 4096, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, positivity, distribution, sampling);
criterion_main!(benches);
