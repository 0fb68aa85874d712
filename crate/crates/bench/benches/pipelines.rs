use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use spt_core::builtins;
use spt_core::cohomology::CohomologyGroup;
use spt_core::indices::index_pair;
use spt_core::interactions::{Interaction, LatticePatch, Metric};
use spt_core::FiniteGroup;

fn bench_cohomology(c: &mut Criterion) {
    let z2 = FiniteGroup::cyclic(2).unwrap();
    let v4 = FiniteGroup::direct_product(&z2, &z2).unwrap();
    let z6 = FiniteGroup::cyclic(6).unwrap();
    c.bench_function("h2_z2xz2", |b| {
        b.iter(|| CohomologyGroup::compute(&v4, 2, 4).unwrap())
    });
    c.bench_function("h2_z6", |b| {
        b.iter(|| CohomologyGroup::compute(&z6, 2, 6).unwrap())
    });
    c.bench_function("h3_z2", |b| {
        b.iter(|| CohomologyGroup::compute(&z2, 3, 2).unwrap())
    });
}

fn bench_indices(c: &mut Criterion) {
    let (aklt, act) = builtins::aklt().unwrap();
    c.bench_function("index_pair_aklt", |b| {
        b.iter(|| index_pair(&aklt, &act).unwrap())
    });
    let (cluster, cact) = builtins::cluster_z2z2().unwrap();
    c.bench_function("index_pair_cluster", |b| {
        b.iter(|| index_pair(&cluster, &cact).unwrap())
    });
}

fn bench_f_norm(c: &mut Criterion) {
    let patch = LatticePatch::line(0, 31, 2).unwrap();
    let mut phi = Interaction::new(patch);
    let mut zz = Array2::<C64>::eye(4);
    zz[(1, 1)] = C64::new(-1.0, 0.0);
    zz[(2, 2)] = C64::new(-1.0, 0.0);
    for i in 0..31 {
        phi.add_term(vec![[i, 0], [i + 1, 0]], zz.clone()).unwrap();
    }
    c.bench_function("f_norm_chain_32", |b| {
        b.iter(|| phi.f_norm(0.5, Metric::Euclidean).unwrap())
    });
}

criterion_group!(benches, bench_cohomology, bench_indices, bench_f_norm);
criterion_main!(benches);
