use criterion::{black_box, criterion_group, criterion_main, Criterion};

use lmsb::gkz::{frobenius_basis, pf_operators};
use lmsb::hae::{genus2, special_geometry};
use lmsb::jacobian::algebraic_route;
use lmsb::yukawa::{gw0_invariants, yukawa_from_wronskian};
use lmsb_bench::fixture;

fn periods(c: &mut Criterion) {
    let (p2, _) = fixture("p2", 1);
    let (f1, _) = fixture("f1", 1);
    c.bench_function("pf_operators/f1", |b| b.iter(|| pf_operators(black_box(&f1.relations)).unwrap()));
    c.bench_function("frobenius/p2/12", |b| b.iter(|| frobenius_basis(black_box(&p2), 12).unwrap()));
    c.bench_function("frobenius/f1/8", |b| b.iter(|| frobenius_basis(black_box(&f1), 8).unwrap()));
}

fn couplings(c: &mut Criterion) {
    let (p2, fb) = fixture("p2", 12);
    let (f0, fb0) = fixture("f0", 6);
    c.bench_function("yukawa_wronskian/p2/12", |b| b.iter(|| yukawa_from_wronskian(&p2, black_box(&fb)).unwrap()));
    c.bench_function("yukawa_wronskian/f0/6", |b| b.iter(|| yukawa_from_wronskian(&f0, black_box(&fb0)).unwrap()));
    c.bench_function("gw0/p2/6", |b| b.iter(|| gw0_invariants(&p2, black_box(&fb), 6).unwrap()));
}

fn higher_genus(c: &mut Criterion) {
    let (p2, fb) = fixture("p2", 8);
    let sg = special_geometry(&p2, &fb).unwrap();
    c.bench_function("genus2_amplitude/p2", |b| b.iter(|| genus2(&p2, black_box(&sg), None).unwrap()));
}

fn jacobian(c: &mut Criterion) {
    let (p2, _) = fixture("p2", 1);
    let mut g = c.benchmark_group("jacobian");
    g.sample_size(10);
    g.bench_function("algebraic_route/p2", |b| b.iter(|| algebraic_route(black_box(&p2)).unwrap()));
    g.finish();
}

criterion_group!(benches, periods, couplings, higher_genus, jacobian);
criterion_main!(benches);
