use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hsd_core::clustering::{kmeans, DistanceBackend, KMeansConfig};
use hsd_core::interferometry::povm_probabilities;
use hsd_core::random::{mixed_state, point_in_ball, rng_from_seed};
use hsd_core::reproduce::TwoGaussians;
use hsd_core::{encode, hsd_exact, measure_hsd, FeatureVector, NoiseModel};
use std::hint::black_box;

fn distances(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let (a, b) = (mixed_state(4, &mut rng), mixed_state(4, &mut rng));

    c.bench_function("hsd_exact_d4", |bench| bench.iter(|| hsd_exact(black_box(&a), black_box(&b)).unwrap()));
    c.bench_function("povm_probabilities", |bench| {
        bench.iter(|| povm_probabilities(black_box(&a), black_box(&b)).unwrap())
    });
    let noise = NoiseModel::binomial(100_000, 2);
    c.bench_function("measure_hsd_binomial", |bench| {
        bench.iter(|| measure_hsd(black_box(&a), black_box(&b), &noise).unwrap())
    });
}

fn encoding(c: &mut Criterion) {
    let mut rng = rng_from_seed(3);
    let u = FeatureVector::new(point_in_ball(15, hsd_core::safe_radius(4), &mut rng)).unwrap();
    c.bench_function("encode_d4", |bench| bench.iter(|| encode(black_box(&u)).unwrap()));
}

fn clustering(c: &mut Criterion) {
    let (points, _) = TwoGaussians::default().sample(1000, 4);
    let cfg = KMeansConfig::new(2, 4);
    let mut group = c.benchmark_group("kmeans_1000");
    group.sample_size(10);
    group.bench_function("euclidean", |bench| {
        bench.iter(|| kmeans(black_box(&points), &cfg, &DistanceBackend::Euclidean).unwrap())
    });
    group.bench_function("hsd_exact", |bench| {
        bench.iter(|| kmeans(black_box(&points), &cfg, &DistanceBackend::HsdExact).unwrap())
    });
    let small: Vec<FeatureVector> = points[..100].to_vec();
    let backend = DistanceBackend::HsdSimulated { noise: NoiseModel::binomial(10_000, 5) };
    group.bench_function("hsd_simulated_100", |bench| {
        bench.iter_batched(|| small.clone(), |p| kmeans(&p, &cfg, &backend).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, distances, encoding, clustering);
criterion_main!(benches);
