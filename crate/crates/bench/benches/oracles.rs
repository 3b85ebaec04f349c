use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use galereg_bench::fixtures;
use galereg_bench::galereg::fiberhom::degree_and_regularity;
use galereg_bench::galereg::quadrangle::regularity_fast;
use galereg_bench::galereg::searches::search_cm_nonci_bounded;

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("degree_and_regularity");
    for (name, l) in fixtures() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &l, |b, l| {
            b.iter(|| degree_and_regularity(black_box(l)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("regularity_fast");
    for (name, l) in fixtures().into_iter().filter(|(_, l)| l.is_saturated()) {
        group.bench_with_input(BenchmarkId::from_parameter(name), &l, |b, l| {
            b.iter(|| regularity_fast(black_box(l)).unwrap())
        });
    }
    group.finish();
}

fn keys(c: &mut Criterion) {
    let (_, l) = fixtures().swap_remove(3);
    c.bench_function("orbit_key", |b| b.iter(|| black_box(&l).orbit_key()));
    c.bench_function("permutation_key", |b| {
        b.iter(|| black_box(&l).permutation_key())
    });
}

fn searches(c: &mut Criterion) {
    let mut group = c.benchmark_group("search_cm_nonci");
    group.sample_size(10);
    group.bench_function("coord1_n5", |b| b.iter(|| search_cm_nonci_bounded(1, 5)));
    group.finish();
}

criterion_group!(benches, oracles, keys, searches);
criterion_main!(benches);
