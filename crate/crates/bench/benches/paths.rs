use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tumorlevy::mc::simulate_exit;
use tumorlevy::{ModelParams, NoiseParams, SimConfig};

fn single_path(c: &mut Criterion) {
    let model = ModelParams::new(0.1, 3.0).unwrap();
    let cfg = SimConfig::new(1e-3, 1e3, 1, 1).unwrap();
    let mut group = c.benchmark_group("path");
    for alpha in [0.5, 1.0, 1.5] {
        let noise = NoiseParams::new(0.5, 0.5, alpha).unwrap();
        group.bench_with_input(BenchmarkId::new("alpha", alpha), &noise, |b, n| {
            let mut i = 0u64;
            b.iter(|| {
                i += 1;
                simulate_exit(black_box(2.5), &model, n, (0.0, 5.0), &cfg, i).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, single_path);
criterion_main!(benches);
