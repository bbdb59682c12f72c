use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lshawkes_core::estimate::{
    estimate_bartlett, estimate_mean_density, estimate_tf_grid, EstimatorConfig, Feasibility,
};
use lshawkes_core::model::{regularized_bartlett, LsHawkesModel};
use lshawkes_core::simulate::{simulate_ls_hawkes, SimulationConfig};
use lshawkes_core::{FreqKernel, TimeKernel};

fn hawkes() -> LsHawkesModel {
    LsHawkesModel::stationary_exponential(1.0, 0.5, 1.0).unwrap()
}

fn simulation(c: &mut Criterion) {
    let model = hawkes();
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    for horizon in [1e3, 1e4] {
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &t| {
            b.iter(|| simulate_ls_hawkes(&model, t, &SimulationConfig::with_seed(1)).unwrap())
        });
    }
    group.finish();
}

fn estimators(c: &mut Criterion) {
    let (k, q) = (TimeKernel::triangle(), FreqKernel::epanechnikov());
    let events = simulate_ls_hawkes(&hawkes(), 2e4, &SimulationConfig::with_seed(2)).unwrap();
    c.bench_function("mean_density", |b| {
        b.iter(|| {
            estimate_mean_density(black_box(&events), 0.5, 0.2, &k, Feasibility::Strict).unwrap()
        })
    });
    let mut group = c.benchmark_group("bartlett");
    group.sample_size(20);
    for b2 in [0.1, 0.02] {
        let cfg = EstimatorConfig::new(0.2, b2);
        group.bench_with_input(BenchmarkId::new("b2", b2), &cfg, |b, cfg| {
            b.iter(|| estimate_bartlett(black_box(&events), 0.5, 1.0, cfg, &k, &q).unwrap())
        });
    }
    let cfg = EstimatorConfig::new(0.2, 0.05);
    let times: Vec<f64> = (0..5).map(|i| 0.3 + 0.1 * i as f64).collect();
    let freqs: Vec<f64> = (0..8).map(|i| 0.25 * i as f64).collect();
    group.bench_function("grid_5x8", |b| {
        b.iter(|| estimate_tf_grid(black_box(&events), &times, &freqs, &cfg, &k, &q).unwrap())
    });
    group.finish();
}

fn theory(c: &mut Criterion) {
    let model = hawkes();
    let q = FreqKernel::epanechnikov();
    c.bench_function("regularized_bartlett", |b| {
        b.iter(|| regularized_bartlett(&model, 0.5, black_box(1.0), 0.05, &q).unwrap())
    });
}

criterion_group!(benches, simulation, estimators, theory);
criterion_main!(benches);
