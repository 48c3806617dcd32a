//! Throughput benchmarks for the signature kernels and forest fitting.
//!
//! Benchmark ids carry the active execution variant so baselines from a
//! `--no-default-features` (sequential) run can be compared against the
//! default rayon build: `cargo bench` then
//! `cargo bench --no-default-features` and diff the saved baselines.
//! The rayon build additionally benches a single-threaded pool in the same
//! run for an in-process comparison.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use sigforest::datagen::{generate, Scenario, SynthSpec};
use sigforest::dictionary::DictionaryKind;
use sigforest::sigcore::{signature_kernel, truncated_signature};
use sigforest::{Forest, ForestConfig, FunctionalDataset, SplitCriterion};

const VARIANT: &str = if cfg!(feature = "parallel") { "parallel" } else { "sequential" };

fn bench_signatures(c: &mut Criterion) {
    let spec = SynthSpec::new(Scenario::planar_brownian()).with_seed(3);
    let data = generate(&spec).unwrap();
    let x = data.to_path(0);
    let y = data.to_path(1);
    let mut group = c.benchmark_group("sigcore");
    for depth in [2usize, 4] {
        group.bench_function(format!("truncated_signature/d2/p100/k{depth}"), |b| {
            b.iter(|| truncated_signature(black_box(x.view()), depth).unwrap())
        });
        group.bench_function(format!("signature_kernel/d2/p100/k{depth}"), |b| {
            b.iter(|| signature_kernel(black_box(x.view()), black_box(y.view()), depth).unwrap())
        });
    }
    group.finish();
}

fn fit_config(criterion: SplitCriterion) -> ForestConfig {
    let mut config = ForestConfig::new(criterion);
    config.n_trees = 50;
    config.depth = 2;
    config.windows = 10;
    config.dictionary.kind = DictionaryKind::Brownian;
    config.seed = 11;
    config
}

fn bench_forest(c: &mut Criterion) {
    let data = generate(&SynthSpec::new(Scenario::brownian_drift()).with_seed(5)).unwrap();
    bench_forest_variants(c, &data, SplitCriterion::Sif, "sif");
    bench_forest_variants(c, &data, SplitCriterion::Ksif, "ksif");
}

fn bench_forest_variants(
    c: &mut Criterion,
    data: &FunctionalDataset,
    criterion: SplitCriterion,
    name: &str,
) {
    let config = fit_config(criterion);
    let mut group = c.benchmark_group(format!("forest/{name}"));
    group.sample_size(10);

    group.bench_function(format!("fit/{VARIANT}"), |b| {
        b.iter(|| Forest::fit(black_box(data), &config).unwrap())
    });
    let forest = Forest::fit(data, &config).unwrap();
    group.bench_function(format!("score_all/{VARIANT}"), |b| {
        b.iter(|| forest.score_all(black_box(data)).unwrap())
    });

    // same build, forced onto one thread, for an in-process comparison
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("fit/one-thread-pool", |b| {
            b.iter(|| pool.install(|| Forest::fit(black_box(data), &config).unwrap()))
        });
        group.bench_function("score_all/one-thread-pool", |b| {
            b.iter(|| pool.install(|| forest.score_all(black_box(data)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_signatures, bench_forest);
criterion_main!(benches);
