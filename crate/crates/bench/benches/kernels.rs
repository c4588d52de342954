use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use idregret::bayes::PosteriorSystem;
use idregret::classify::{capacity_profile, MarginalTail};
use idregret::energy::{energy_spectral, rate_function_lower_bound, DEFAULT_SEED};
use idregret::levy::transition_density;
use idregret::regret::integrated_regret;
use idregret::{symmetrize, PriorSpec};
use idregret_bench::{grid, marginal, models};

fn density_synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("transition_density");
    for m in models() {
        let sym = symmetrize(&m).unwrap();
        for n in [1024, 16384] {
            let g = grid(n);
            group.bench_with_input(BenchmarkId::new(m.label(), n), &g, |b, g| {
                b.iter(|| transition_density(black_box(&sym), 1.0, g).unwrap())
            });
        }
    }
    group.finish();
}

fn energies(c: &mut Criterion) {
    let mut group = c.benchmark_group("energy");
    group.sample_size(10);
    let g = grid(2048);
    for m in models() {
        let sym = symmetrize(&m).unwrap();
        let mu = marginal(&m, &g);
        let root = mu.sqrt();
        group.bench_function(BenchmarkId::new("spectral", m.label()), |b| {
            b.iter(|| energy_spectral(black_box(&sym), black_box(&root)).unwrap())
        });
        group.bench_function(BenchmarkId::new("rate_lower_bound", m.label()), |b| {
            b.iter(|| rate_function_lower_bound(&sym, black_box(&mu), 12, DEFAULT_SEED).unwrap())
        });
    }
    group.finish();
}

fn kernels_and_regret(c: &mut Criterion) {
    let mut group = c.benchmark_group("posterior");
    group.sample_size(10);
    let prior = PriorSpec::gaussian(1.0).unwrap();
    for m in models() {
        let g = grid(512);
        group.bench_function(BenchmarkId::new("kernel", m.label()), |b| {
            b.iter(|| PosteriorSystem::new(black_box(&m), &prior, &g).unwrap())
        });
        group.bench_function(BenchmarkId::new("regret", m.label()), |b| {
            b.iter(|| integrated_regret(black_box(&m), &prior, &g).unwrap())
        });
    }
    group.finish();
}

fn capacity(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity");
    group.sample_size(10);
    for d in [1usize, 2] {
        let beta = d as f64 - 0.5;
        group.bench_function(BenchmarkId::from_parameter(d), |b| {
            b.iter(|| capacity_profile(d, 1.0, &MarginalTail::ClosedExponent(beta), black_box(&[1e2])).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, density_synthesis, energies, kernels_and_regret, capacity);
criterion_main!(benches);
