use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use elfact_bench::uniform_potential;
use elfact_core::{count_classes, enumerate_classes, Grading};

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_classes");
    for (r, n) in [(1, 6), (2, 6), (3, 6), (4, 5)] {
        let w = uniform_potential(r, n);
        group.bench_with_input(BenchmarkId::new("graded", format!("r{r}_n{n}")), &w, |b, w| {
            b.iter(|| enumerate_classes(black_box(w), Grading::Graded).unwrap().count())
        });
        group.bench_with_input(BenchmarkId::new("even", format!("r{r}_n{n}")), &w, |b, w| {
            b.iter(|| enumerate_classes(black_box(w), Grading::Even).unwrap().count())
        });
    }
    group.finish();
}

fn formula(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_classes");
    for r in [3, 8, 16] {
        let w = uniform_potential(r, 4);
        group.bench_with_input(BenchmarkId::from_parameter(r), &w, |b, w| {
            b.iter(|| count_classes(black_box(w), Grading::Graded))
        });
    }
    group.finish();
}

criterion_group!(benches, census, formula);
criterion_main!(benches);
