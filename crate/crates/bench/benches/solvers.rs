use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use extremal_bench::{concave_table, line_problem, wavy_table};
use extremal_core::quantum::{lzjc_optimal, LzjcModel, LzjcOptions};
use extremal_core::{
    allocate_optimize, extremal_expectation, lp_extremal, parse, random_feasible, segment_domain, split_distribution,
    AllocationOptions, Direction, InflectionMode,
};

fn closed_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("closed_form");
    for k in [10, 100, 1000] {
        let p = line_problem(k, 0.8);
        let f = concave_table(&p);
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| extremal_expectation(black_box(&p), &f, Direction::Max).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    for k in [10, 50, 200] {
        let p = line_problem(k, 0.8);
        let f = concave_table(&p);
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| lp_extremal(black_box(&p), &f, Direction::Max).unwrap())
        });
    }
    g.finish();
}

fn split(c: &mut Criterion) {
    let p = line_problem(50, 1.0);
    let d = random_feasible(&p, 1);
    c.bench_function("split/50", |b| b.iter(|| split_distribution(black_box(&d), &p).unwrap()));
}

fn segmented(c: &mut Criterion) {
    let mut g = c.benchmark_group("segmented");
    g.sample_size(10);
    for period in [6.0, 3.0] {
        let p = line_problem(30, 1.0);
        let f = wavy_table(&p, period);
        let grid = p.grid().to_vec();
        let plan = segment_domain(&f, grid[0], grid[grid.len() - 1], InflectionMode::Discrete(&grid)).unwrap();
        let label = format!("{}_intervals", plan.intervals.len());
        g.bench_function(label, |b| {
            b.iter(|| {
                allocate_optimize(black_box(&plan), 1.0, p.n_bar(), Direction::Max, &AllocationOptions::default())
                    .unwrap()
            })
        });
    }
    let model = LzjcModel::new(1.0, 0.3).unwrap();
    g.bench_function("lzjc_nbar_20", |b| {
        b.iter(|| lzjc_optimal(&model, black_box(20.0), &LzjcOptions::default()).unwrap())
    });
    g.finish();
}

fn parser(c: &mut Criterion) {
    let text = "16*pi^2*(x+1)^2*exp(-2*pi*(x+1)/4) / (1 - exp(-2*pi*(x+1)/4)) + sqrt(abs(sin(x)))";
    c.bench_function("parse", |b| b.iter(|| parse(black_box(text)).unwrap()));
    let ast = parse(text).unwrap();
    c.bench_function("eval", |b| b.iter(|| ast.eval(black_box(3.5)).unwrap()));
}

criterion_group!(benches, closed_form, oracle, split, segmented, parser);
criterion_main!(benches);
