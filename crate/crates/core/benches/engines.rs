//! Sequential vs parallel evaluation of the data-parallel loops.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use spinchain_fid::closed_form::{fid_closed_finite_with, fid_infinite_with, ClosedFormVariant};
use spinchain_fid::experiment::{fit_fid_with, map_time, synthetic_records, PulseCycleSpec, SearchInterval, SyntheticSpec};
use spinchain_fid::fermion::fid_free_fermion_with;
use spinchain_fid::oracle::OracleEngine;
use spinchain_fid::{ChainSpec, Execution, TimeGrid};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn free_fermion(c: &mut Criterion) {
    let mut group = c.benchmark_group("free_fermion");
    let grid = TimeGrid::from_t_max(1e-3, 512).unwrap();
    for n in [100usize, 4000] {
        let chain = ChainSpec::new(n, 15.5e3).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &chain, |b, chain| {
                b.iter(|| fid_free_fermion_with(black_box(chain), &grid, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_form");
    let grid = TimeGrid::from_t_max(1e-3, 512).unwrap();
    let chain = ChainSpec::new(20, 15.5e3).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new("j0", name), |b| {
            b.iter(|| fid_infinite_with(black_box(&chain), &grid, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new("bessel_series", name), |b| {
            b.iter(|| fid_closed_finite_with(black_box(&chain), &grid, ClosedFormVariant::BesselSeries, exec).unwrap())
        });
    }
    group.finish();
}

fn oracle_fid(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_fid");
    group.sample_size(10);
    let grid = TimeGrid::from_t_max(5e-4, 64).unwrap();
    let engine = OracleEngine::new(&ChainSpec::new(8, 15.5e3).unwrap()).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| engine.fid(black_box(&grid), exec).unwrap()));
    }
    group.finish();
}

fn fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    let cycle = PulseCycleSpec::default();
    let spec = SyntheticSpec { noise_sigma: 0.02, seed: 1, ..Default::default() };
    let points = map_time(&synthetic_records(&spec, &cycle).unwrap(), &cycle);
    let search = SearchInterval::new(1e3, 1e5).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| fit_fid_with(black_box(&points), search, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, free_fermion, closed_forms, oracle_fid, fit);
criterion_main!(benches);
