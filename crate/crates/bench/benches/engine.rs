use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mixcert_bench::{bench_power, bench_regular};
use mixcert_core::quadrature::gauss_legendre_01;
use mixcert_core::{run_pipeline, GroupSpec};

fn ball_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_ball");
    for radius in [4u64, 6, 8] {
        g.bench_with_input(BenchmarkId::new("z2", radius), &radius, |b, &r| {
            let spec = GroupSpec::lattice(2);
            b.iter(|| spec.enumerate_ball(r).unwrap().len())
        });
        g.bench_with_input(BenchmarkId::new("f2", radius), &radius, |b, &r| {
            let spec = GroupSpec::free(2);
            b.iter(|| spec.enumerate_ball(r).unwrap().len())
        });
    }
    g.finish();
}

fn regular_pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline_regular_z2");
    g.sample_size(10);
    for probe_radius in [2u64, 3] {
        g.bench_with_input(
            BenchmarkId::from_parameter(probe_radius),
            &probe_radius,
            |b, &pr| {
                let s = bench_regular(24.0, 8, pr);
                b.iter(|| run_pipeline(&s).unwrap().report.span_dim)
            },
        );
    }
    g.finish();
}

fn dense_pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline_power");
    g.sample_size(10);
    for dim in [8usize, 16] {
        g.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &d| {
            let s = bench_power(d, 8);
            b.iter(|| run_pipeline(&s).unwrap().report.span_dim)
        });
    }
    g.finish();
}

fn quadrature_nodes(c: &mut Criterion) {
    c.bench_function("gauss_legendre_64", |b| {
        b.iter(|| gauss_legendre_01(64).0[0])
    });
}

criterion_group!(
    benches,
    ball_enumeration,
    regular_pipeline,
    dense_pipeline,
    quadrature_nodes
);
criterion_main!(benches);
