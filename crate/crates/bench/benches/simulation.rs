use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qflqg_core::presets::{self, STABLE_COSTS};
use qflqg_core::{monte_carlo, offline_schedule, simulate_run, SelectionPolicy};

fn single_run(c: &mut Criterion) {
    let inst = presets::stable(STABLE_COSTS).unwrap();
    let offline = SelectionPolicy::Offline(offline_schedule(&inst).unwrap());
    c.bench_function("run_offline", |b| {
        b.iter(|| simulate_run(&inst, black_box(&offline), 0, 0).unwrap())
    });
    c.bench_function("run_greedy", |b| {
        b.iter(|| simulate_run(&inst, black_box(&SelectionPolicy::Greedy), 0, 0).unwrap())
    });
    let rollout = SelectionPolicy::Rollout {
        base: offline_schedule(&inst).unwrap(),
        n_samples: 16,
    };
    let mut group = c.benchmark_group("rollout");
    group.sample_size(10);
    group.bench_function("run_rollout_16", |b| {
        b.iter(|| simulate_run(&inst, black_box(&rollout), 0, 0).unwrap())
    });
    group.finish();
}

fn batch(c: &mut Criterion) {
    let inst = presets::unstable().unwrap();
    let policy = SelectionPolicy::Offline(offline_schedule(&inst).unwrap());
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("offline_1000_runs", |b| {
        b.iter(|| monte_carlo(&inst, black_box(&policy), 1000, 0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, single_run, batch);
criterion_main!(benches);
