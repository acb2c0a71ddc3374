use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use toricghz::topo::state_on_family;
use toricghz::{build_lattice, disentangle, find_family, groups_equal, prepare, verify_ladders, LatticeKind};

fn family_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_family");
    for (kind, l) in [(LatticeKind::Triangular, 4), (LatticeKind::Square, 6), (LatticeKind::SquareOctagon, 4)] {
        let g = build_lattice(kind, l, l).unwrap();
        group.bench_with_input(BenchmarkId::new(kind.name(), l), &g, |b, g| {
            b.iter(|| find_family(black_box(g)).unwrap())
        });
    }
    // search without the lattice hint
    let bare = build_lattice(LatticeKind::Triangular, 3, 3).unwrap().without_legend();
    group.bench_function("triangular_bare/3", |b| b.iter(|| find_family(black_box(&bare)).unwrap()));
    group.finish();
}

fn rewrite(c: &mut Criterion) {
    let mut group = c.benchmark_group("disentangle");
    for l in [2, 4, 6, 8] {
        let g = build_lattice(LatticeKind::Triangular, l, l).unwrap();
        let fam = find_family(&g).unwrap();
        let state = state_on_family(&g, &fam).unwrap();
        group.bench_with_input(BenchmarkId::new("triangular", l), &(state, fam), |b, (s, f)| {
            b.iter(|| disentangle(black_box(s), black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(20);
    for l in [2, 4] {
        let g = build_lattice(LatticeKind::Triangular, l, l).unwrap();
        let fam = find_family(&g).unwrap();
        let state = state_on_family(&g, &fam).unwrap();
        let d = disentangle(&state, &fam).unwrap();
        group.bench_function(BenchmarkId::new("groups_equal", l), |b| b.iter(|| groups_equal(&d.output, &d.exact)));
        group.bench_function(BenchmarkId::new("verify_ladders", l), |b| b.iter(|| verify_ladders(&g, &fam, &d, false)));
    }
    let small = build_lattice(LatticeKind::Square, 2, 2).unwrap();
    let fam = find_family(&small).unwrap();
    let d = disentangle(&state_on_family(&small, &fam).unwrap(), &fam).unwrap();
    group.bench_function("oracle/square_2", |b| b.iter(|| verify_ladders(&small, &fam, &d, true)));
    group.finish();
}

fn renormalization(c: &mut Criterion) {
    let g = build_lattice(LatticeKind::Kagome, 2, 2).unwrap();
    c.bench_function("prepare/kagome_2", |b| b.iter(|| prepare(black_box(&g)).unwrap()));
}

criterion_group!(benches, family_search, rewrite, verification, renormalization);
criterion_main!(benches);
