use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use optomech::oracle::{simulate, OracleConfig};
use optomech_bench::device_one;

fn oracle(c: &mut Criterion) {
    let mut sys = device_one();
    sys.cavity_noise = None;
    let mut cfg = OracleConfig::for_system(&sys, 1, 7);
    cfg.segment_len = 1 << 16;
    cfg.segments_per_member = 1;
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("one member, 65536 samples", |b| b.iter(|| simulate(black_box(&sys), &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, oracle);
criterion_main!(benches);
