use criterion::{criterion_group, criterion_main, Criterion};
use mdsclass::classify::classify;
use mdsclass::ClassifyOptions;

fn bench_classify(c: &mut Criterion) {
    c.bench_function("classify q=3 full chain", |b| {
        b.iter(|| classify(&ClassifyOptions::new(3)).unwrap())
    });
    let mut group = c.benchmark_group("larger");
    group.sample_size(10);
    group.bench_function("classify q=4 full chain", |b| {
        b.iter(|| classify(&ClassifyOptions::new(4)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_classify);
criterion_main!(benches);
