use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orlicz_bench::{log_grid, mixed_problem, power_problem, sample_field};
use orlicz_core::bounds::{check_hypotheses, ConstantLedger};
use orlicz_core::eigen::solve_first;
use orlicz_core::orlicz::luxemburg_norm;
use orlicz_core::{SolveOptions, Weight, YoungFunction};
use std::hint::black_box;

fn young(c: &mut Criterion) {
    let g = YoungFunction::piecewise_power(2.0, 4.0).unwrap();
    let gt = g.conjugate();
    let ts = log_grid(64);
    c.bench_function("young/inverse", |b| {
        b.iter(|| ts.iter().map(|&t| g.inverse(black_box(t)).unwrap()).sum::<f64>())
    });
    c.bench_function("young/conjugate_value", |b| {
        b.iter(|| ts.iter().map(|&t| gt.value(black_box(t))).sum::<f64>())
    });
}

fn norms(c: &mut Criterion) {
    let g = YoungFunction::power_log(3.0).unwrap();
    let mut group = c.benchmark_group("luxemburg_norm");
    for n in [128, 1024] {
        let u = sample_field(n);
        let w = Weight::constant(1.0, u.domain()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| {
            b.iter(|| luxemburg_norm(&g, &w, black_box(u)).unwrap())
        });
    }
    group.finish();
}

fn solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_first");
    group.sample_size(10);
    let opts = SolveOptions { n: 256, ..Default::default() };
    for p in [2.0, 3.0] {
        let problem = power_problem(p);
        group.bench_with_input(BenchmarkId::new("power", p), &problem, |b, pr| {
            b.iter(|| solve_first(pr, &opts).unwrap().lambda)
        });
    }
    let mixed = mixed_problem(2.0);
    group.bench_function("mixed", |b| b.iter(|| solve_first(&mixed, &opts).unwrap().lambda));
    group.finish();
}

fn hypotheses(c: &mut Criterion) {
    let p = mixed_problem(1.0);
    let mut group = c.benchmark_group("ledger");
    group.sample_size(10);
    group.bench_function("check_and_derive", |b| {
        b.iter(|| {
            let hyp = check_hypotheses(&p.g, &p.h, 1, &p.weight, &p.domain);
            ConstantLedger::derive(&p.g, &p.h, &p.domain, &hyp)
        })
    });
    group.finish();
}

criterion_group!(benches, young, norms, solves, hypotheses);
criterion_main!(benches);
