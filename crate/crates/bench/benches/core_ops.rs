//! Wall-clock benchmarks for the operations that dominate device
//! construction and verification.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use discrim_core::antisym::antisym_projector;
use discrim_core::discriminator::{build_optimal_equal, build_universal};
use discrim_core::matrix::{hermitian_eig, identity, kron};
use discrim_core::{haar_random_state, success_probabilities, trial_rng, StateVector};

fn bench_kron(c: &mut Criterion) {
    let mut group = c.benchmark_group("kron");
    for dim in [8usize, 32] {
        let a = identity(dim);
        let b = identity(dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |bencher, _| {
            bencher.iter(|| kron(&a, &b))
        });
    }
    group.finish();
}

fn bench_antisym_projector(c: &mut Criterion) {
    let mut group = c.benchmark_group("antisym_projector");
    for (n, m) in [(2usize, 3usize), (3, 4), (4, 4)] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_m{m}")),
            &(n, m),
            |bencher, &(n, m)| bencher.iter(|| antisym_projector(n, m).unwrap()),
        );
    }
    group.finish();
}

fn bench_device_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("device_build");
    group.sample_size(10);
    group.bench_function("optimal_equal_n3", |b| {
        b.iter(|| build_optimal_equal(3).unwrap())
    });
    group.bench_function("universal_n2_m4", |b| {
        b.iter(|| build_universal(2, 4).unwrap())
    });
    group.finish();
}

fn bench_hermitian_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    group.sample_size(10);
    for (n, m) in [(2usize, 3usize), (3, 4)] {
        let povm = build_universal(n, m).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("pi0_n{n}_m{m}")),
            &povm,
            |bencher, povm| bencher.iter(|| hermitian_eig(povm.element(0)).unwrap()),
        );
    }
    group.finish();
}

fn bench_success_probabilities(c: &mut Criterion) {
    let mut group = c.benchmark_group("success_probabilities");
    group.sample_size(20);
    for (n, m) in [(2usize, 3usize), (3, 4)] {
        let povm = build_universal(n, m).unwrap();
        let mut rng = trial_rng(5, 0);
        let states: Vec<StateVector> = (0..n).map(|_| haar_random_state(m, &mut rng)).collect();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_m{m}")),
            &(povm, states),
            |bencher, (povm, states)| bencher.iter(|| success_probabilities(povm, states).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_kron,
    bench_antisym_projector,
    bench_device_build,
    bench_hermitian_eig,
    bench_success_probabilities
);
criterion_main!(benches);
