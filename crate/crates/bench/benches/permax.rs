use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use permax_core::{
    bregman_bound, build_family, canonical_form, exhaustive_max, hillclimb_lower_bound,
    permanent_expansion, permanent_ryser, BinMatrix, Engine, FamilyId, FamilySpec, SearchOptions,
};

fn derangements(n: usize) -> BinMatrix {
    let full = (1u64 << n) - 1;
    BinMatrix::from_rows(n, (0..n).map(|i| full & !(1 << i)).collect()).unwrap()
}

fn permanents(c: &mut Criterion) {
    let d8 = derangements(8);
    let d14 = derangements(14);
    let d22 = derangements(22);
    let d28 = derangements(28);
    c.bench_function("expansion n=8", |b| {
        b.iter(|| permanent_expansion(black_box(&d8)))
    });
    c.bench_function("ryser n=8", |b| b.iter(|| permanent_ryser(black_box(&d8))));
    c.bench_function("ryser n=14", |b| {
        b.iter(|| permanent_ryser(black_box(&d14)))
    });
    c.bench_function("ryser n=22", |b| {
        b.iter(|| permanent_ryser(black_box(&d22)))
    });
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("ryser n=28 big", |b| {
        b.iter(|| permanent_ryser(black_box(&d28)))
    });
    g.finish();
    c.bench_function("bregman n=22", |b| {
        b.iter(|| bregman_bound(black_box(&d22)))
    });
}

fn canonical(c: &mut Criterion) {
    let f = build_family(&FamilySpec::new(FamilyId::F, 8, 22)).unwrap();
    let n12 = build_family(&FamilySpec::new(FamilyId::N, 12, 33)).unwrap();
    c.bench_function("canonical F_{8,22}", |b| {
        b.iter(|| canonical_form(black_box(&f)))
    });
    c.bench_function("canonical N_{12,33}", |b| {
        b.iter(|| canonical_form(black_box(&n12)))
    });
}

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let bnb = SearchOptions::engine(Engine::Bnb);
    g.bench_function("bnb n=6 sigma=18", |b| {
        b.iter(|| exhaustive_max(6, 18, &bnb))
    });
    g.bench_function("bnb n=7 sigma=14", |b| {
        b.iter(|| exhaustive_max(7, 35, &bnb))
    });
    let naive = SearchOptions::engine(Engine::Naive);
    g.bench_function("naive n=5 sigma=10", |b| {
        b.iter(|| exhaustive_max(5, 15, &naive))
    });
    let hc = SearchOptions::engine(Engine::Hillclimb).with_budget(100);
    g.bench_function("hillclimb n=8 sigma=22 x100", |b| {
        b.iter(|| hillclimb_lower_bound(8, 42, &hc))
    });
    g.finish();
}

criterion_group!(benches, permanents, canonical, searches);
criterion_main!(benches);
