use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use resdist::dynamics::{integrate_forced, ForcingSignal, Lorenz, DEFAULT_X0};
use resdist::linalg::{random_sparse, spectral_radius, RidgeAccumulator, RngSeed, POWER_MAX_ITERS, POWER_TOL};
use resdist::metrics::{attractor_distance, AttractorReference};
use resdist::reservoir::{Reservoir, ReservoirConfig};

fn reservoir_step(c: &mut Criterion) {
    let mut res = Reservoir::build(ReservoirConfig::default()).unwrap();
    let x = [1.0, -2.0, 20.0];
    c.bench_function("reservoir_step_m1000", |b| b.iter(|| res.step(black_box(&x)).unwrap()));
}

fn ridge_accumulate(c: &mut Criterion) {
    let m = 1000;
    let states: Vec<Vec<f64>> = (0..512)
        .map(|k| (0..m).map(|i| ((i * 7 + k * 13) % 101) as f64 / 101.0 - 0.5).collect())
        .collect();
    let target = [0.3, -0.1];
    let mut group = c.benchmark_group("ridge");
    group.sample_size(10);
    group.bench_function("accumulate_512_m1000", |b| {
        b.iter_batched(
            || RidgeAccumulator::new(m, 2),
            |mut acc| {
                for s in &states {
                    acc.push(s, &target).unwrap();
                }
                acc.solve(1e-6).unwrap()
            },
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn spectral(c: &mut Criterion) {
    let a = random_sparse(1000, 0.006, -0.5, 0.5, RngSeed(1)).unwrap();
    let mut group = c.benchmark_group("spectral");
    group.sample_size(10);
    group.bench_function("radius_m1000", |b| {
        b.iter(|| spectral_radius(&a, POWER_TOL, POWER_MAX_ITERS).unwrap())
    });
    group.finish();
}

fn distance(c: &mut Criterion) {
    let lorenz = Lorenz::default();
    let zero = ForcingSignal::zero(3);
    let reference = integrate_forced(&lorenz, &zero, &DEFAULT_X0, 0.002, 200.0)
        .unwrap()
        .states
        .skip(25_000);
    let reference = AttractorReference::new(reference).unwrap();
    let traj = integrate_forced(&lorenz, &zero, &[2.0, 1.0, 1.0], 0.002, 60.0)
        .unwrap()
        .states
        .skip(25_000);
    let mut group = c.benchmark_group("distance");
    group.sample_size(10);
    group.bench_function("attractor_5k_vs_75k", |b| {
        b.iter(|| attractor_distance(&traj, &reference).unwrap())
    });
    group.finish();
}

criterion_group!(kernels, reservoir_step, ridge_accumulate, spectral, distance);
criterion_main!(kernels);
