use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use heatmap_tsp::heatmap::loss_and_gradient;
use heatmap_tsp::train::init_logits;
use heatmap_tsp::{column_softmax, indicator_to_heatmap, Instance, LossWeights, TrainConfig};

fn bench_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("indicator_to_heatmap");
    for n in [20, 100, 200] {
        let logits = init_logits(n, &TrainConfig::for_size(n)).unwrap();
        let t = column_softmax(&logits).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| {
            b.iter(|| indicator_to_heatmap(black_box(t)))
        });
    }
    group.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("loss_and_gradient");
    let weights = LossWeights::new(10.0, 10.0).unwrap();
    for n in [20, 100, 200] {
        let dist = Instance::random(n, 1).unwrap().distance_matrix();
        let logits = init_logits(n, &TrainConfig::for_size(n)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &logits, |b, s| {
            b.iter(|| loss_and_gradient(black_box(s), &dist, weights).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_transform, bench_gradient);
criterion_main!(benches);
