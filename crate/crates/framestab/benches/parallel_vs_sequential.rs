//! Rayon fan-out against the sequential fallback on the two hot loops:
//! batched spectrum evaluation of the `Q_U` family and the full multistart
//! `a_0` search.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use framestab::search::{estimate_a0, estimate_a0_seq, haar_unitary};
use framestab::{exec, generate_frame, GeneratorKind, HermitianFrame, SearchConfig};

fn bench_frame(n: usize, m: usize) -> HermitianFrame {
    generate_frame(GeneratorKind::RandomHermitian, n, 1, m, 7).unwrap()
}

fn spectrum_batch(c: &mut Criterion) {
    let frame = bench_frame(6, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let unitaries: Vec<_> = (0..64).map(|_| haar_unitary(6, &mut rng)).collect();
    let eval = |i: usize| {
        let u = &unitaries[i];
        let u1 = u.columns(0, 1).into_owned();
        let u2 = u.columns(1, 5).into_owned();
        framestab::beta_upper_local(&frame, &u1, &u2).unwrap()
    };

    let mut group = c.benchmark_group("qz_spectrum_batch");
    group.bench_function(BenchmarkId::new("rayon", 64), |b| {
        b.iter(|| black_box(exec::map_indexed(unitaries.len(), eval)))
    });
    group.bench_function(BenchmarkId::new("sequential", 64), |b| {
        b.iter(|| black_box(exec::map_indexed_seq(unitaries.len(), eval)))
    });
    group.finish();
}

fn multistart_a0(c: &mut Criterion) {
    let frame = bench_frame(4, 10);
    let cfg = SearchConfig {
        starts: 16,
        max_iters: 60,
        seed: 5,
        ..SearchConfig::default()
    };

    let mut group = c.benchmark_group("multistart_a0");
    group.sample_size(10);
    group.bench_function("rayon", |b| {
        b.iter(|| black_box(estimate_a0(&frame, &cfg).unwrap().a0))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(estimate_a0_seq(&frame, &cfg).unwrap().a0))
    });
    group.finish();
}

criterion_group!(benches, spectrum_batch, multistart_a0);
criterion_main!(benches);
