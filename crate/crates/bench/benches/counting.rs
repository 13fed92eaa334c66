use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use homcount_core::data::erdos_renyi;
use homcount_core::hom::{count_cycles, count_family, count_paths};
use homcount_core::{embed_tensor, generate_sbm, FamilySpec, SbmSpec, Weights, DEFAULT_EPSILON};

fn cycles_and_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("walks");
    for n in [100, 400, 1600] {
        let g = erdos_renyi(n, 8.0 / n as f64, 1).unwrap();
        let ks: Vec<usize> = (3..=10).collect();
        group.bench_with_input(BenchmarkId::new("cycles:10", n), &g, |b, g| {
            b.iter(|| count_cycles(black_box(g), Weights::Unit, &ks).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("paths:10", n), &g, |b, g| {
            b.iter(|| count_paths(black_box(g), Weights::Unit, 10).unwrap())
        });
    }
    group.finish();
}

fn tree_family(c: &mut Criterion) {
    let g = erdos_renyi(500, 0.02, 2).unwrap();
    let mut group = c.benchmark_group("trees");
    group.sample_size(10);
    for k in [6, 8, 10] {
        let family = FamilySpec::Trees(k).build().unwrap();
        group.bench_with_input(BenchmarkId::new("family", k), &family, |b, f| {
            b.iter(|| count_family(black_box(&g), Weights::Unit, &f.patterns, false, None).unwrap())
        });
    }
    group.finish();
}

fn tensor_embedding(c: &mut Criterion) {
    let ds = generate_sbm(&SbmSpec { num_graphs: 4, ..SbmSpec::cluster_default() }).unwrap();
    let graphs: Vec<_> = ds.graphs.iter().map(|g| g.preprocess_zero_features(DEFAULT_EPSILON).unwrap()).collect();
    let family = FamilySpec::Cycles(10).build().unwrap();
    c.bench_function("tensor cycles:10 on 4 cluster graphs", |b| {
        b.iter(|| graphs.iter().map(|g| embed_tensor(g, &family).unwrap().dim()).sum::<usize>())
    });
}

criterion_group!(benches, cycles_and_paths, tree_family, tensor_embedding);
criterion_main!(benches);
