use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ordinal_ramsey::lower::Peeler;
use ordinal_ramsey::parse::ord;
use ordinal_ramsey::{arrow_check, compare, fs_step, pigeon_front, SeqCtx};
use ordinal_ramsey_bench::{fs_inputs, ordered_pairs, peel_tuples, uniform_fronts};

fn bench_fs_step(c: &mut Criterion) {
    let ctx = SeqCtx::default();
    let mut group = c.benchmark_group("fs_step");
    for (name, alpha) in fs_inputs() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &alpha, |b, alpha| {
            b.iter(|| fs_step(black_box(alpha), black_box(5), &ctx))
        });
    }
    group.finish();
}

fn bench_compare(c: &mut Criterion) {
    let pairs = ordered_pairs(1, 256);
    c.bench_function("compare/256 sampled pairs", |b| {
        b.iter(|| pairs.iter().filter(|(x, y)| compare(black_box(x), black_box(y)).is_lt()).count())
    });
}

fn bench_pigeon(c: &mut Criterion) {
    let mut group = c.benchmark_group("pigeon");
    let fronts = uniform_fronts(2, 2);
    let p = pigeon_front(&fronts).expect("pigeon front");
    group.bench_function("classify 4-set", |b| b.iter(|| p.classify(black_box(&[0, 1, 2, 3]))));
    let c1 = uniform_fronts(1, 1).remove(0);
    group.bench_function("arrow 6 points", |b| {
        b.iter(|| arrow_check(black_box(&[0, 1, 2, 3, 4, 5]), &fronts, &c1, 1 << 20))
    });
    group.finish();
}

fn bench_peel(c: &mut Criterion) {
    let ctx = SeqCtx::default();
    let tuples = peel_tuples(2, 64);
    let rho = ord("w^(w+1)");
    c.bench_function("peel/64 tuples at w^(w+1)", |b| {
        b.iter(|| {
            let mut p = Peeler::new(&ctx);
            tuples.iter().map(|t| p.peel(black_box(&rho), t).map(|v| v.len()).unwrap_or(0)).sum::<usize>()
        })
    });
}

criterion_group!(benches, bench_fs_step, bench_compare, bench_pigeon, bench_peel);
criterion_main!(benches);
