use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stableset::{exact_mis, fit_parameters, solve_step_b, FitStatus, MinimizeOptions, PolytopeSpec, VertexSet};
use stableset_bench::{fit_config, workload};

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_mis");
    for n in [30, 50, 70] {
        let g = workload(n, 0.2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| exact_mis(black_box(g), None)));
    }
    group.finish();
}

fn fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_parameters");
    group.sample_size(10);
    for (n, k) in [(25, 4), (150, 20)] {
        let cfg = fit_config(n, k);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n}_{k}")), &cfg, |b, cfg| {
            b.iter(|| fit_parameters(black_box(cfg)).unwrap())
        });
    }
    let mut curved = fit_config(25, 4);
    curved.convexity = true;
    group.bench_function("25_4_curvature_rows", |b| b.iter(|| fit_parameters(black_box(&curved)).unwrap()));
    group.finish();
}

fn step_b(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_b");
    group.sample_size(10);
    for n in [25, 50] {
        let g = workload(n, 0.2);
        let k = exact_mis(&g, None).optimal().expect("no budget").witness.len();
        let cfg = fit_config(n, k);
        let report = fit_parameters(&cfg).unwrap();
        assert_eq!(report.status, FitStatus::Optimal);
        let params = report.params.unwrap();
        let spec = PolytopeSpec::new(g, k, cfg.w(), VertexSet::new(), 0.0).unwrap();
        let opts = MinimizeOptions::default();
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| solve_step_b(black_box(&spec), &params, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact, fit, step_b);
criterion_main!(benches);
