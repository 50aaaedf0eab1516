//! Sequential vs rayon execution of the experiment harness, plus the hot
//! per-round kernels of MOGLB-UCB.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use moglb_core::config::ExperimentConfig;
use moglb_core::harness::{run_experiment, Execution};
use moglb_core::linalg::SpdState;
use moglb_core::pareto::{pareto_front, RewardMatrix};
use moglb_core::policies::AlgoKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bench_experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);

    let cfg = ExperimentConfig {
        dim: 5,
        num_objectives: 5,
        horizon: 300,
        trials: 8,
        algorithms: AlgoKind::ALL.to_vec(),
        ..ExperimentConfig::default()
    };
    for (label, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::new(label, "d5_T300_x8"), &exec, |b, &exec| {
            b.iter(|| black_box(run_experiment(&cfg, exec).unwrap().records.len()))
        });
    }
    group.finish();
}

fn bench_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let values: Vec<f64> = (0..40 * 5).map(|_| rng.random()).collect();
    let matrix = RewardMatrix::new(40, 5, values).unwrap();
    group.bench_function("pareto_front_40x5", |b| {
        b.iter(|| black_box(pareto_front(black_box(&matrix))))
    });

    let mut spd = SpdState::new(10, 1.0).unwrap();
    let xs: Vec<Vec<f64>> = (0..64)
        .map(|_| (0..10).map(|_| rng.random_range(-0.3..0.3)).collect())
        .collect();
    group.bench_function("rank1_update_d10", |b| {
        let mut i = 0;
        b.iter(|| {
            spd.rank1_update(&xs[i % xs.len()], 0.1).unwrap();
            i += 1;
        })
    });

    let far: Vec<f64> = (0..10).map(|k| 1.0 + k as f64 * 0.1).collect();
    group.bench_function("ball_project_d10", |b| {
        b.iter(|| black_box(spd.project_onto_ball(black_box(&far), 1.0).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_experiment, bench_kernels);
criterion_main!(benches);
