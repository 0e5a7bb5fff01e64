use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mzsim_bench::{turn_grid, CHAIN_PROGRAM};
use mzsim_core::observables::coincidence_first_stage;
use mzsim_core::{dsl, ensemble, networks, CbwChainSpec, CoupledMziSpec, PhaseDistribution};

fn chain_composition(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_matrix");
    for n in [1u32, 4, 8] {
        group.bench_function(format!("n{n}"), |b| {
            let spec = CbwChainSpec::new(n, 0.7, PI).unwrap();
            b.iter(|| networks::cbw_chain(black_box(&spec)));
        });
    }
    group.finish();
}

fn coupled_matrix(c: &mut Criterion) {
    c.bench_function("coupled_matrix", |b| {
        let spec = CoupledMziSpec::new(0.3, 1.1);
        b.iter(|| networks::coupled_mzi_matrix(black_box(&spec)));
    });
}

fn rate_scan(c: &mut Criterion) {
    let grid = turn_grid(1000);
    c.bench_function("first_stage_scan_1000", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&z| coincidence_first_stage(black_box(z)).r)
                .sum::<f64>()
        });
    });
}

fn parse_and_bind(c: &mut Criterion) {
    let mut bindings = BTreeMap::new();
    bindings.insert("PHI".to_string(), 0.4);
    c.bench_function("dsl_parse_bind", |b| {
        b.iter(|| {
            let program = dsl::parse(black_box(CHAIN_PROGRAM)).unwrap();
            program.bind(&bindings).unwrap().matrix()
        });
    });
}

fn washout(c: &mut Criterion) {
    let dist = PhaseDistribution::uniform(0.0, std::f64::consts::TAU).unwrap();
    c.bench_function("washout_mean_10k", |b| {
        b.iter(|| ensemble::washout_mean(black_box(&dist), 0.4, 10_000, 1).unwrap());
    });
}

criterion_group!(
    kernels,
    chain_composition,
    coupled_matrix,
    rate_scan,
    parse_and_bind,
    washout
);
criterion_main!(kernels);
