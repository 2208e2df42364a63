use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use zipfpoi_core::bounds::{pick_n, prefix_error_bound};
use zipfpoi_core::simulate::{
    ordering_outcome, replicate_stream, run_experiment, sample_ensemble, sample_poisson,
};
use zipfpoi_core::special::{hurwitz_zeta, ln_gamma, riemann_zeta, solve_zeta_equals};
use zipfpoi_core::{EnsembleParams, Precision};

fn special_functions(c: &mut Criterion) {
    let prec = Precision::default();
    c.bench_function("riemann_zeta(1.106)", |b| {
        b.iter(|| riemann_zeta(black_box(1.106), &prec))
    });
    c.bench_function("hurwitz_zeta(1.5, 3.25)", |b| {
        b.iter(|| hurwitz_zeta(black_box(1.5), black_box(3.25), &prec))
    });
    c.bench_function("solve_zeta_equals(10)", |b| {
        b.iter(|| solve_zeta_equals(black_box(10.0), &prec))
    });
    c.bench_function("ln_gamma(4100.5)", |b| {
        b.iter(|| ln_gamma(black_box(4100.5)))
    });
}

fn bounds(c: &mut Criterion) {
    let p = EnsembleParams::zipf(1e7, 1.106).unwrap();
    c.bench_function("prefix_error_bound(72)", |b| {
        b.iter(|| prefix_error_bound(black_box(72), &p))
    });
    c.bench_function("pick_n(eps=0.01)", |b| {
        b.iter(|| pick_n(&p, black_box(0.01), 100_000))
    });
}

fn simulation(c: &mut Criterion) {
    let p = EnsembleParams::zipf(1e7, 1.106).unwrap();
    c.bench_function("sample_poisson(6.2e6)", |b| {
        let mut rng = replicate_stream(1, 0);
        b.iter(|| sample_poisson(black_box(6.2e6), &mut rng))
    });
    c.bench_function("ensemble draw + classify (M=292)", |b| {
        let mut rng = replicate_stream(2, 0);
        b.iter(|| ordering_outcome(&sample_ensemble(&p, 292, &mut rng).unwrap().counts))
    });
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    group.bench_function("run_experiment(reps=1000)", |b| {
        b.iter(|| run_experiment(&p, 1000, 73, black_box(3)))
    });
    group.finish();
}

criterion_group!(benches, special_functions, bounds, simulation);
criterion_main!(benches);
