use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heunc::polynomial::solve_polynomials;
use heunc::roots::RootOptions;
use heunc::series::{eval_derivative, taylor_coeffs};
use heunc::{Complex64, EvalOptions, HeunParams, Verifier};

fn params() -> HeunParams {
    HeunParams::new(
        Complex64::new(0.9, 0.3),
        Complex64::new(0.4, -0.2),
        Complex64::new(-0.3, 0.6),
        Complex64::new(-0.8, 0.5),
        Complex64::new(0.6, -0.1),
    )
    .unwrap()
}

fn series(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("taylor_coeffs");
    for m in [20usize, 60, 200] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| taylor_coeffs(black_box(&p), m).unwrap())
        });
    }
    g.finish();

    let opts = EvalOptions::default();
    let z = Complex64::new(0.3, 0.2);
    let mut g = c.benchmark_group("eval_derivative");
    for n in 0..=2usize {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| eval_derivative(&p, black_box(z), n, &opts).unwrap())
        });
    }
    g.finish();
}

fn polynomials(c: &mut Criterion) {
    let (a, b0, g0) = (Complex64::new(1.0, 0.2), Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.4));
    let opts = RootOptions::default();
    let mut g = c.benchmark_group("solve_polynomials");
    for n in [1u32, 3, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve_polynomials(a, b0, g0, black_box(n), &opts).unwrap())
        });
    }
    g.finish();
}

fn identities(c: &mut Criterion) {
    let p = params();
    let v = Verifier::new(7);
    c.bench_function("verify/basic_n3", |b| b.iter(|| v.basic_commutation(black_box(&p), 3, 8).unwrap()));
    c.bench_function("verify/chain_n3_m60", |b| b.iter(|| v.chain(black_box(&p), 3, 60).unwrap()));
    c.bench_function("verify/darboux_n3_m60", |b| {
        b.iter(|| v.darboux(p.alpha(), p.beta(), p.gamma(), black_box(p.eta()), 3, 60).unwrap())
    });
}

criterion_group!(benches, series, polynomials, identities);
criterion_main!(benches);
