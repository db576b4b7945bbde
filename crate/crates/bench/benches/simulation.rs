use std::sync::Arc;

use clique_gibbs::chain::{default_p, delta_for_samples, mixing_time, sample, step, ChainParams};
use clique_gibbs::cube::{hardcore_fast_batch, BatchState, CubeSimulator};
use clique_gibbs::estimator::{count_hardcore, EstimateOptions, SamplerKind};
use clique_gibbs::*;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn hardcore(n: usize, d: usize) -> GibbsModel {
    let g = Graph::random_regular(n, d, 1).unwrap();
    make_hardcore(Arc::new(g), Fugacity::from_f64(0.5 / (d - 1) as f64).unwrap())
}

fn batch_transition(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_transition");
    for n in [8usize, 27, 64] {
        let m = hardcore(n, 4);
        let mut sim = CubeSimulator::new(&m, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut state = BatchState::initial(&m, 0, n);
            let mut ledger = MessageLedger::new(n);
            let mut t = 0;
            b.iter(|| {
                sim.transition(&mut state, 0.3, 0, t, &mut ledger).unwrap();
                t += 1;
            });
        });
    }
    group.finish();
}

fn gather(c: &mut Criterion) {
    let m = make_potts(Arc::new(Graph::random_regular(64, 4, 2).unwrap()), 9, Temperature::Finite(1.0)).unwrap();
    let sim = CubeSimulator::new(&m, 64).unwrap();
    let state = BatchState::initial(&m, 0, 64);
    c.bench_function("gather_hamiltonians/64", |b| {
        b.iter(|| sim.gather_hamiltonians(black_box(&state), &mut MessageLedger::new(64)).unwrap())
    });
}

fn reference_chain(c: &mut Criterion) {
    let m = make_potts(Arc::new(Graph::random_regular(64, 4, 3).unwrap()), 9, Temperature::Infinite).unwrap();
    let params = ChainParams::new(0.3, 0);
    let x = m.initial_state(0, 0);
    c.bench_function("reference_step/64", |b| b.iter(|| step(&m, black_box(&x), &params, 0, 0, 0)));
    let edge = make_hardcore(Arc::new(Graph::path(2)), Fugacity::one());
    let (p, _) = default_p(&edge);
    let params = ChainParams::new(p, mixing_time(&edge, p, 0.005).unwrap());
    c.bench_function("reference_sample/edge", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            sample(&edge, &params, 0, i)
        })
    });
}

fn fast_path(c: &mut Criterion) {
    let m = hardcore(64, 8);
    let (p, _) = default_p(&m);
    let params = ChainParams::new(p, mixing_time(&m, p, delta_for_samples(64)).unwrap());
    c.bench_function("hardcore_fast_batch/64", |b| {
        b.iter(|| hardcore_fast_batch(&m, 64, &params, 0, &mut MessageLedger::new(64)).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_hardcore_path3");
    group.sample_size(10);
    let g = Graph::path(3);
    for kind in [SamplerKind::Reference, SamplerKind::Fast] {
        let opts = EstimateOptions {
            sampler: Some(kind),
            ..EstimateOptions::default()
        };
        group.bench_function(format!("{kind:?}").to_lowercase(), |b| {
            b.iter(|| count_hardcore(&g, "0.4".parse().unwrap(), 0.2, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batch_transition, gather, reference_chain, fast_path, counting);
criterion_main!(benches);
