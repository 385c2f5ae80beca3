use std::hint::black_box;

use blockrec::chain::{generate_decoupled, generate_perturbation};
use blockrec::experiment::{run_campaign, run_sweep, ExperimentConfig, XGrid};
use blockrec::recovery::{pairwise_distances_with, recover_empirical, RecoveryOptions};
use blockrec::spectral::{spectral_split, DEFAULT_GAP_TOL};
use blockrec::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn distances(c: &mut Criterion) {
    let mut group = c.benchmark_group("pairwise_distances");
    for n in [60usize, 200] {
        let sizes = vec![n / 4; 4];
        let inst = generate_perturbation(&generate_decoupled(&sizes, 1, 0.0).unwrap(), 1).unwrap();
        let t = inst.transition_at(0.01).unwrap();
        let p = spectral_split(&t.laplacian().unwrap(), 4, DEFAULT_GAP_TOL).unwrap().p_right;
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &p, |b, p| {
                b.iter(|| pairwise_distances_with(black_box(p), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn empirical(c: &mut Criterion) {
    let mut group = c.benchmark_group("recover_empirical");
    let inst = generate_perturbation(&generate_decoupled(&[30, 30, 30], 2, 0.0).unwrap(), 2).unwrap();
    let t = inst.transition_at(0.01).unwrap();
    for (name, exec) in MODES {
        let opts = RecoveryOptions { exec, ..RecoveryOptions::default() };
        group.bench_function(name, |b| b.iter(|| recover_empirical(black_box(&t), 3, &opts).unwrap()));
    }
    group.finish();
}

fn experiments(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiments");
    group.sample_size(10);
    let sweep = ExperimentConfig {
        sizes: Some(vec![10, 10, 10]),
        seed: 3,
        x_grid: Some(XGrid::Range { min: 0.0, max: 0.05, points: 16 }),
        timestamp: false,
        ..Default::default()
    };
    let campaign = ExperimentConfig { instances: 16, max_n: 30, timestamp: false, ..Default::default() };
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("sweep", name), |b| b.iter(|| run_sweep(&sweep, exec).unwrap()));
        group.bench_function(BenchmarkId::new("campaign", name), |b| b.iter(|| run_campaign(&campaign, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, distances, empirical, experiments);
criterion_main!(benches);
