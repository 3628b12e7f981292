use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qql_bench::program_fixture;
use qql_core::program::{run, run_final};
use qql_core::{grover, StateVector, UnitaryOp};

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_hadamard");
    for m in [10, 14, 18] {
        let s = StateVector::uniform(m);
        let h = UnitaryOp::hadamard(m / 2);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| black_box(s.apply(&h).unwrap()))
        });
    }
    group.finish();
}

fn grover_curve(c: &mut Criterion) {
    let mut group = c.benchmark_group("grover_success_curve");
    for n in [8, 12, 16] {
        let kmax = (std::f64::consts::FRAC_PI_4 * 2f64.powf(n as f64 / 2.0)).ceil() as usize;
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(grover::success_curve(n, kmax).unwrap()))
        });
    }
    group.finish();
}

fn program_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("program_run");
    for n in [6, 10, 14] {
        let (p, a, input) = program_fixture(n, 8, 3);
        group.bench_with_input(BenchmarkId::new("traced", n), &n, |b, _| {
            b.iter(|| black_box(run(&p, &a, &input).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("final", n), &n, |b, _| {
            b.iter(|| black_box(run_final(&p, &a, &input).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, apply, grover_curve, program_run);
criterion_main!(benches);
