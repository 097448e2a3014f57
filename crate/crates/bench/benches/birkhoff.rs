use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rotlab::birkhoff::{birkhoff_law, l2_via_parseval};
use rotlab::{birkhoff_sum, birkhoff_value, exact, BirkhoffConfig, PartialQuotients};

fn golden(h: u64) -> BirkhoffConfig {
    BirkhoffConfig::psi_star(PartialQuotients::golden(), h).unwrap()
}

fn sweep_law(c: &mut Criterion) {
    let cfg = golden(1_000_000);
    let mut g = c.benchmark_group("sweep_law");
    for n in [1_000u64, 100_000, 1_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| birkhoff_law(&cfg, black_box(n), 0).unwrap())
        });
    }
    g.finish();
}

fn doubling(c: &mut Criterion) {
    let cfg = golden(100_000);
    let mut g = c.benchmark_group("doubling_sum");
    for n in [987u64, 10_000, 100_000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| birkhoff_sum(&cfg, black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn direct_value(c: &mut Criterion) {
    let cfg = golden(100_000);
    let x = exact::rat(1, 7);
    c.bench_function("direct_value_100000", |b| {
        b.iter(|| birkhoff_value(&cfg, black_box(&x), 100_000).unwrap())
    });
}

fn parseval(c: &mut Criterion) {
    let cfg = golden(233);
    let mut g = c.benchmark_group("parseval_n233");
    g.sample_size(10);
    for k in [1_000u64, 10_000] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| l2_via_parseval(&cfg, 233, black_box(k)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweep_law, doubling, direct_value, parseval);
criterion_main!(benches);
