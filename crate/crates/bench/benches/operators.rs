use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use baxterq_core::bulk::LatticeModel;
use baxterq_core::exact::rat;
use baxterq_core::operators::{q_operator_at, q_operator_for, transfer_matrix_at, Assembly};
use baxterq_core::spectral::{SpectralConfig, SpectralContext};
use baxterq_core::{ChainParams, ExactPolynomial, Sign};

fn transfer(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer_matrix");
    for l in [2usize, 3, 4] {
        let model = LatticeModel::from_params(&ChainParams::default_for(l));
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| transfer_matrix_at(&model, l, &ExactPolynomial::z()).unwrap())
        });
    }
    group.finish();
}

fn q_polynomial(c: &mut Criterion) {
    let mut group = c.benchmark_group("q_operator_polynomial");
    group.sample_size(10);
    for l in [2usize, 3, 4] {
        let model = LatticeModel::from_params(&ChainParams::default_for(l));
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| q_operator_for(&model, l, Sign::Plus, Assembly::BlockDiagonal).unwrap())
        });
    }
    group.finish();
}

fn q_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("q_operator_at_point");
    group.sample_size(10);
    let z0 = rat(2, 7);
    for l in [3usize, 4, 5] {
        let model = LatticeModel::from_params(&ChainParams::default_for(l));
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| q_operator_at(&model, l, Sign::Plus, black_box(&z0), Assembly::BlockDiagonal).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let ctx = SpectralContext::new(&ChainParams::default_for(3), SpectralConfig::default()).unwrap();
    c.bench_function("spectrum_L3_all_sectors", |b| b.iter(|| ctx.all(Sign::Plus).unwrap()));
}

criterion_group!(benches, transfer, q_polynomial, q_point, spectrum);
criterion_main!(benches);
