//! Compares the rayon-backed scans against their sequential fallbacks.
//!
//! Run with the default features for the parallel lane and with
//! `--no-default-features` for the sequential one; the reported baseline
//! names make the two runs comparable side by side.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use valsets::bounds::{ratio_sweep, BoundKind, SweepGrid};
use valsets::field::FieldContext;
use valsets::poly::PolySpec;
use valsets::quadrics::IntConic;
use valsets::t_f;

#[cfg(feature = "parallel")]
const LANE: &str = "parallel";
#[cfg(not(feature = "parallel"))]
const LANE: &str = "sequential";

fn bench_t_f(c: &mut Criterion) {
    let mut group = c.benchmark_group("t_f_scan");
    for p in [1009u64, 10007] {
        let ctx = FieldContext::new(p).unwrap();
        let f = PolySpec::new(p, &[1, 3, 7]);
        group.bench_with_input(BenchmarkId::new(LANE, p), &p, |b, _| {
            b.iter(|| t_f(&f, 8, &ctx).unwrap())
        });
    }
    group.finish();
}

fn bench_box_count(c: &mut Criterion) {
    let mut group = c.benchmark_group("conic_box_naive");
    let conic = IntConic::new(3, -1, 2, 5, -7, -11);
    for h in [500u64, 2000] {
        group.bench_with_input(BenchmarkId::new(LANE, h), &h, |b, &h| {
            b.iter(|| conic.count_points_box_naive(h))
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let grid = SweepGrid {
        primes: vec![101, 211, 307, 401, 503, 601, 701, 809, 907],
        degree: 2,
        polys_per_prime: 4,
        seed: 1,
        h_values: vec![8, 16, 32, 64],
        u_values: vec![0],
        max_order: None,
        bound: BoundKind::Nfig,
    };
    c.bench_function(&format!("ratio_sweep/{LANE}"), |b| {
        b.iter(|| ratio_sweep(&grid).unwrap())
    });
}

criterion_group!(
    name = lanes;
    config = Criterion::default().sample_size(10);
    targets = bench_t_f, bench_box_count, bench_sweep
);
criterion_main!(lanes);
