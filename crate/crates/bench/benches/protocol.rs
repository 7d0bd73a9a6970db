use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use delsync::codes::{encode, multi_decode, vt_decode, vt_syndrome, CodeSpec};
use delsync::harness::draw;
use delsync::{rng, synchronize, ProtocolParams};

fn bench_codes(c: &mut Criterion) {
    let spec = CodeSpec::two_deletion(0x5eed);
    let mut g = c.benchmark_group("codes");
    for q in [64usize, 256, 1024] {
        let x = rng::random_bits(&mut rng::stream(q as u64, rng::LABEL_SOURCE), q);
        let y1 = x.delete_positions(&[q / 3]);
        let s1 = vt_syndrome(&x);
        g.bench_with_input(BenchmarkId::new("vt_decode", q), &q, |b, &q| {
            b.iter(|| vt_decode(black_box(&y1), s1, q).unwrap())
        });
        let y2 = x.delete_positions(&[q / 4, q / 2]);
        let s2 = encode(&x, 2, &spec);
        g.bench_with_input(BenchmarkId::new("two_deletion_decode", q), &q, |b, &q| {
            b.iter(|| multi_decode(black_box(&y2), 2, &s2, q, &spec).unwrap())
        });
    }
    g.finish();
}

fn bench_session(c: &mut Criterion) {
    let mut g = c.benchmark_group("synchronize");
    g.sample_size(10);
    for beta in [0.001, 0.01] {
        let n = 50_000;
        let (x, ch) = draw(n, beta, 7);
        for (name, p) in [
            ("baseline", ProtocolParams::baseline(n, beta, 2.0, 7)),
            ("improved", ProtocolParams::improved(n, beta, 2.0, 7)),
        ] {
            g.bench_with_input(BenchmarkId::new(name, beta), &beta, |b, _| {
                b.iter(|| synchronize(black_box(&x), &ch.y, &p).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, bench_codes, bench_session);
criterion_main!(benches);
