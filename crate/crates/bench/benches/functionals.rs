use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hazardlab::montecarlo::{all_functionals, cumhaz, path_second_moment, path_second_moment_pairwise};
use hazardlab::rng::replicate_rng;
use hazardlab_bench::{fixture, ou_model, rect_model, sampler};

const HORIZON: f64 = 500.0;

fn sampling(c: &mut Criterion) {
    let (kernel, intensity) = ou_model();
    let s = sampler(&kernel, intensity, HORIZON).unwrap();
    let mut r = 0;
    c.bench_function("sample/ou_eg_T500", |b| {
        b.iter_batched(
            || {
                r += 1;
                replicate_rng(1, r)
            },
            |mut rng| s.sample(&mut rng),
            BatchSize::SmallInput,
        )
    });
}

fn ou_functionals(c: &mut Criterion) {
    let (kernel, intensity) = ou_model();
    let sample = fixture(&kernel, intensity, HORIZON).unwrap();
    let mut g = c.benchmark_group("ou_eg_T500");
    g.bench_function("cumhaz", |b| b.iter(|| cumhaz(black_box(&sample), &kernel, HORIZON)));
    g.bench_function("path_second_moment/sweep", |b| {
        b.iter(|| path_second_moment(black_box(&sample), &kernel, HORIZON))
    });
    g.bench_function("path_second_moment/pairwise", |b| {
        b.iter(|| path_second_moment_pairwise(black_box(&sample), &kernel, HORIZON))
    });
    g.bench_function("all_functionals", |b| {
        b.iter(|| all_functionals(black_box(&sample), &kernel, HORIZON))
    });
    g.finish();
}

fn rect_functionals(c: &mut Criterion) {
    // Short horizon: the generalized gamma sample is dense.
    let horizon = 20.0;
    let (kernel, intensity) = rect_model();
    let sample = fixture(&kernel, intensity, horizon).unwrap();
    let mut g = c.benchmark_group("rect_gg_T20");
    g.sample_size(10);
    g.bench_function("path_second_moment/sweep", |b| {
        b.iter(|| path_second_moment(black_box(&sample), &kernel, horizon))
    });
    g.bench_function("path_second_moment/pairwise", |b| {
        b.iter(|| path_second_moment_pairwise(black_box(&sample), &kernel, horizon))
    });
    g.finish();
}

criterion_group!(benches, sampling, ou_functionals, rect_functionals);
criterion_main!(benches);
