use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use evosand::engine::{stabilize, Configuration, EngineState, Limits, TerminationMode};
use evosand::lattice::finite::finite_lattice;
use evosand::lattice::{run_central_pile_with, Backend, LatticeSchedule};
use evosand::stats::{fit_power_law, run_dynamics, DynamicsConfig, PowerLawSampler};
use rand::SeedableRng;

fn central_piles(c: &mut Criterion) {
    let mut g = c.benchmark_group("central_pile");
    g.sample_size(10);
    for name in ["static", "model-d", "model-g", "doubled"] {
        let s = LatticeSchedule::by_name(name).unwrap();
        g.bench_with_input(BenchmarkId::new("rounds", name), &s, |b, s| {
            b.iter(|| run_central_pile_with(s, black_box(5000), Limits::PATTERNS, Backend::Rounds, |_| {}))
        });
    }
    let s = LatticeSchedule::static_grid();
    for n in [5000u64, 100_000] {
        g.bench_with_input(BenchmarkId::new("static_direct", n), &n, |b, &n| {
            b.iter(|| run_central_pile_with(&s, black_box(n), Limits::PATTERNS, Backend::Auto, |_| {}))
        });
    }
    g.finish();
}

fn finite_stabilization(c: &mut Criterion) {
    let sched = finite_lattice(30, 30, &LatticeSchedule::model_d());
    let values: Vec<u64> = (0..900).map(|k| if k % 7 == 0 { 9 } else { 2 }).collect();
    let config = Configuration::from_non_sink(&sched, &values).unwrap();
    c.bench_function("stabilize_30x30_model_d", |b| {
        b.iter(|| {
            stabilize(
                EngineState::new(config.clone()),
                &sched,
                TerminationMode::FullPeriodQuiet,
                Limits::PATTERNS,
            )
        })
    });
}

fn dynamics(c: &mut Criterion) {
    let mut g = c.benchmark_group("dynamics");
    g.sample_size(10);
    let cfg = DynamicsConfig::new(LatticeSchedule::model_g(), 50, 50, 1000, 1);
    g.bench_function("model_g_50x50_1000", |b| b.iter(|| run_dynamics(black_box(&cfg)).unwrap()));
    g.finish();
}

fn fitting(c: &mut Criterion) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let sampler = PowerLawSampler::new(2.5, 1);
    let data: Vec<u64> = (0..10_000).map(|_| sampler.sample(&mut rng)).collect();
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    g.bench_function("power_law_10k", |b| b.iter(|| fit_power_law(black_box(&data)).unwrap()));
    g.finish();
}

criterion_group!(benches, central_piles, finite_stabilization, dynamics, fitting);
criterion_main!(benches);
