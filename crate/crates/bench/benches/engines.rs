use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use orthorec::ball::kernel::fixed_point_coefficients;
use orthorec::ball::{ball_coefficients, estimate_k};
use orthorec::exact::exact_coefficients;
use orthorec::inequalities::verify_inequality_suite;
use orthorec::series::{functional_equation_residual, identity_partial_sum};
use orthorec::util::parse_decimal;

fn engines(c: &mut Criterion) {
    let mut g = c.benchmark_group("engines");
    g.sample_size(10);
    g.bench_function("exact n=200", |b| {
        b.iter(|| exact_coefficients(black_box(200)).unwrap())
    });
    g.bench_function("ball n=2000", |b| {
        b.iter(|| ball_coefficients(black_box(2000), 1e-20, 128).unwrap())
    });
    g.bench_function("kernel n=2000 F=256", |b| {
        b.iter(|| fixed_point_coefficients(black_box(2000), 256, &mut |_| {}).unwrap())
    });
    g.finish();
}

fn checks(c: &mut Criterion) {
    let exact = exact_coefficients(200).unwrap();
    let ball = ball_coefficients(2000, 1e-20, 128).unwrap();
    let t = parse_decimal("0.5").unwrap();
    let mut g = c.benchmark_group("checks");
    g.sample_size(10);
    g.bench_function("inequalities exact n<=200", |b| {
        b.iter(|| verify_inequality_suite(&exact, 1, 200).unwrap())
    });
    g.bench_function("inequalities ball n<=2000", |b| {
        b.iter(|| verify_inequality_suite(&ball, 1, 2000).unwrap())
    });
    g.bench_function("identity r=1 N=2000", |b| {
        b.iter(|| identity_partial_sum(&ball, 1, 2000).unwrap())
    });
    g.bench_function("functional t=0.5 N=2000", |b| {
        b.iter(|| functional_equation_residual(&ball, &t, 2000).unwrap())
    });
    g.bench_function("K estimate", |b| b.iter(|| estimate_k(&ball).unwrap()));
    g.finish();
}

criterion_group!(benches, engines, checks);
criterion_main!(benches);
