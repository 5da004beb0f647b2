use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pmh_core::datasets::{reference_lgss, synthetic_sv, SV_SYNTHETIC_PARAMS};
use pmh_core::particle_filter::{bootstrap_sv, fully_adapted_lgss, multinomial_resample};
use pmh_core::{kalman_filter, stream, LgssParameters};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn filters(c: &mut Criterion) {
    let lgss = reference_lgss();
    let sv = synthetic_sv();
    let params = LgssParameters::default();

    c.bench_function("kalman/T=250", |b| {
        b.iter(|| kalman_filter(black_box(&lgss.observations), &params, 0.0).unwrap())
    });

    let mut group = c.benchmark_group("fully_adapted_lgss/T=250");
    for n in [100, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut rng = stream(1);
            b.iter(|| fully_adapted_lgss(&lgss.observations, &params, n, 0.0, &mut rng).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("bootstrap_sv/T=500");
    group.sample_size(20);
    for n in [100, 500] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut rng = stream(2);
            b.iter(|| bootstrap_sv(&sv.observations, &SV_SYNTHETIC_PARAMS, n, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn resampling(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let raw: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    c.bench_function("multinomial_resample/N=1000", |b| {
        b.iter(|| multinomial_resample(black_box(&weights), &mut rng).unwrap())
    });
}

criterion_group!(benches, filters, resampling);
criterion_main!(benches);
