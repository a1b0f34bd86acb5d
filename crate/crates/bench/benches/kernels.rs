use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qdisc_core::discord::{global_discord_at, symmetric_discord, symmetric_discord_at};
use qdisc_core::measure::{dephase, real_basis_from_angles};
use qdisc_core::model::{
    build_hamiltonian_in_sector, chain_ground_state, ground_state, reduced_pair_state, LanczosConfig, LinearOperator,
    Sector,
};
use qdisc_core::{Boundary, MeasurementAngles, Mode, OptimizerConfig};

fn hamiltonian(c: &mut Criterion) {
    let h = build_hamiltonian_in_sector(12, 0.5, Boundary::Periodic, Sector::Magnetization(0)).unwrap();
    let x = vec![1.0 / (h.dim() as f64).sqrt(); h.dim()];
    let mut y = vec![0.0; h.dim()];
    c.bench_function("matvec L=12 M=0", |b| b.iter(|| h.apply(black_box(&x), &mut y)));

    let h = build_hamiltonian_in_sector(10, 0.5, Boundary::Open, Sector::Magnetization(0)).unwrap();
    let cfg = LanczosConfig::default();
    c.bench_function("ground state L=10", |b| b.iter(|| ground_state(black_box(&h), &cfg).unwrap()));
}

fn discord(c: &mut Criterion) {
    let gs = chain_ground_state(8, 1.0, Boundary::Open, &LanczosConfig::default()).unwrap();
    let rho = reduced_pair_state(&gs.state, 3, 4).unwrap();
    let basis = real_basis_from_angles(0.3, 0.1, 0.2).unwrap();

    c.bench_function("dephase two sites", |b| b.iter(|| dephase(black_box(&rho), &[basis, basis]).unwrap()));
    c.bench_function("symmetric objective", |b| {
        b.iter(|| symmetric_discord_at(black_box(&rho), &[basis, basis]).unwrap())
    });

    let mut group = c.benchmark_group("optimised");
    group.sample_size(10);
    let cfg = OptimizerConfig::default();
    group.bench_function("symmetric discord real", |b| {
        b.iter(|| symmetric_discord(black_box(&rho), Mode::Real, &cfg).unwrap())
    });
    group.finish();

    let ring = chain_ground_state(6, 0.0, Boundary::Periodic, &LanczosConfig::default()).unwrap();
    let angles = vec![MeasurementAngles::real(0.3, 0.1, 0.2); 6];
    c.bench_function("global objective L=6", |b| b.iter(|| global_discord_at(black_box(&ring.state), &angles).unwrap()));
}

criterion_group!(benches, hamiltonian, discord);
criterion_main!(benches);
