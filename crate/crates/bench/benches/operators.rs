use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use padic_radial::cauchy::{solve, Nonlinearity, ProblemSpec, SolverConfig};
use padic_radial::fracint::ialpha_on_window;
use padic_radial::{apply_dalpha, apply_ialpha, kernel_constant, Prime, RadialFunction, TailModel};
use std::hint::black_box;

fn window(p: Prime, len: i64) -> RadialFunction {
    RadialFunction::from_fn(
        p,
        -len / 2,
        len / 2,
        |k| (k as f64 * 0.3).cos(),
        TailModel::constant(1.0),
        TailModel::Zero,
        1.0,
    )
    .unwrap()
}

fn operators(c: &mut Criterion) {
    let p = Prime::new(3).unwrap();
    let mut group = c.benchmark_group("pointwise");
    for len in [64, 512] {
        let u = window(p, len);
        group.bench_with_input(BenchmarkId::new("dalpha", len), &u, |b, u| {
            b.iter(|| apply_dalpha(black_box(u), 1.5, 0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ialpha", len), &u, |b, u| {
            b.iter(|| apply_ialpha(black_box(u), 1.5, 0).unwrap())
        });
    }
    group.finish();

    let phi: Vec<f64> = (0..512).map(|k| (k as f64 * 0.1).sin()).collect();
    c.bench_function("ialpha_on_window/512", |b| {
        b.iter(|| ialpha_on_window(p, 1.5, -256, black_box(&phi)).unwrap())
    });
    c.bench_function("kernel_constant", |b| {
        b.iter(|| kernel_constant(p, black_box(1.5), black_box(0.2)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let p = Prime::new(2).unwrap();
    let rhs = Nonlinearity::cos_decay(p, 0.1, 2.0).unwrap();
    let problem = ProblemSpec::new(p, 1.5, 0.25, 0.5, rhs).unwrap();
    let config = SolverConfig {
        spot_check: false,
        restart_check: false,
        ..SolverConfig::default()
    };
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("cos_decay", |b| b.iter(|| solve(black_box(&problem), &config).unwrap()));
    group.finish();
}

criterion_group!(benches, operators, solver);
criterion_main!(benches);
