use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use arbor_core::adaptive_sort::{
    par_mergesort_with_mode, partition_sort_via_duality, seq_mergesort, union_mergesort, ExecMode,
};
use arbor_core::permutation::{
    default_block_size, gen_bit_reversal, gen_block_bit_reversal, gen_random, gen_sorted,
    Permutation,
};

fn families(n: usize) -> Vec<(&'static str, Permutation)> {
    vec![
        ("sorted", gen_sorted(n).unwrap()),
        ("random", gen_random(n, 42).unwrap()),
        ("bitrev", gen_bit_reversal(n).unwrap()),
        (
            "blockbitrev",
            gen_block_bit_reversal(n, default_block_size(n)).unwrap(),
        ),
    ]
}

fn bench_algorithms(c: &mut Criterion) {
    let n = 1 << 12;
    let mut group = c.benchmark_group("sort-4096");
    group.throughput(Throughput::Elements(n as u64));
    for (family, p) in families(n) {
        group.bench_with_input(BenchmarkId::new("seq", family), &p, |b, p| {
            b.iter(|| seq_mergesort(p).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("par", family), &p, |b, p| {
            b.iter(|| par_mergesort_with_mode(p, ExecMode::Parallel).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("union", family), &p, |b, p| {
            b.iter(|| union_mergesort(p, ExecMode::Parallel).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dual", family), &p, |b, p| {
            b.iter(|| partition_sort_via_duality(p).unwrap())
        });
    }
    group.finish();
}

fn bench_adaptivity_sweep(c: &mut Criterion) {
    // Sequential mergesort across sizes on an easy and a hard family; the
    // gap between the two curves is the adaptivity.
    let mut group = c.benchmark_group("seq-sweep");
    for k in [8u32, 10, 12, 14] {
        let n = 1usize << k;
        group.throughput(Throughput::Elements(n as u64));
        let sorted = gen_sorted(n).unwrap();
        let bitrev = gen_bit_reversal(n).unwrap();
        group.bench_with_input(BenchmarkId::new("sorted", n), &sorted, |b, p| {
            b.iter(|| seq_mergesort(p).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bitrev", n), &bitrev, |b, p| {
            b.iter(|| seq_mergesort(p).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_algorithms, bench_adaptivity_sweep);
criterion_main!(benches);
