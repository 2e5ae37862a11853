use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use srpolar_core::code::{construct_frozen_set, ebno_to_sigma};
use srpolar_core::gaussian::GaussianTable;
use srpolar_core::sim::{DecoderChoice, PointContext};
use srpolar_core::srfsc::Decoder;
use srpolar_core::ta::decode_ta_with;
use srpolar_core::tree::identify_sr_cover;
use srpolar_core::CodeSpec;

const EBNO: f64 = 3.0;

fn half_rate(n: usize) -> CodeSpec {
    construct_frozen_set(n, 1 << (n - 1), ebno_to_sigma(2.0, 0.5), None).unwrap()
}

/// A fixed pool of noisy frames so every decoder sees the same input.
fn frames(decoder: &Decoder, count: u64) -> Vec<Vec<f64>> {
    let ctx = PointContext::new(decoder, DecoderChoice::Srfsc, EBNO, 1).unwrap();
    (0..count).map(|t| ctx.frame(t).unwrap().1).collect()
}

fn decoders(c: &mut Criterion) {
    let mut group = c.benchmark_group("decode");
    for n in [7, 10] {
        let spec = half_rate(n);
        let sc = Decoder::sc(&spec);
        let fast = Decoder::srfsc(&spec);
        let pool = frames(&fast, 64);

        let mut ws = sc.workspace();
        let mut t = 0;
        group.bench_function(BenchmarkId::new("sc", 1 << n), |b| {
            b.iter(|| {
                t = (t + 1) % pool.len();
                black_box(sc.decode_with(&pool[t], None, &mut ws).unwrap())
            })
        });

        let mut ws = fast.workspace();
        group.bench_function(BenchmarkId::new("srfsc", 1 << n), |b| {
            b.iter(|| {
                t = (t + 1) % pool.len();
                black_box(fast.decode_with(&pool[t], None, &mut ws).unwrap())
            })
        });

        let choice = DecoderChoice::Ta {
            epsilon: 0.9,
            c: None,
        };
        let ctx = PointContext::new(&fast, choice, EBNO, 1).unwrap();
        let ta = ctx.ta().unwrap().clone();
        group.bench_function(BenchmarkId::new("ta-srfsc", 1 << n), |b| {
            b.iter(|| {
                t = (t + 1) % pool.len();
                black_box(decode_ta_with(&fast, &ta, &pool[t], &mut ws).unwrap())
            })
        });
    }
    group.finish();
}

fn offline(c: &mut Criterion) {
    let spec = half_rate(10);
    c.bench_function("gaussian-table/1024", |b| {
        b.iter(|| GaussianTable::compute(black_box(10), 0.8).unwrap())
    });
    c.bench_function("sr-cover/1024", |b| {
        b.iter(|| identify_sr_cover(black_box(&spec)))
    });
}

criterion_group!(benches, decoders, offline);
criterion_main!(benches);
