use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion, Throughput};

use edushard_bench::{synthetic_corpus, synthetic_sequences};
use edushard_core::dedup::dedup_stream;
use edushard_core::filter::apply_filters;
use edushard_core::pack::pack_stream;
use edushard_core::shard::{list_shards, shuffle, stream_read, write_shards};
use edushard_core::tokenize::tokenize_parallel;
use edushard_core::{ByteTokenizer, Codec, FilterConfig, PackConfig, ShardWriteConfig, StreamConfig};

fn corpus_stages(c: &mut Criterion) {
    let docs = synthetic_corpus(5_000, 7);
    let bytes: u64 = docs.iter().map(|d| d.text.len() as u64).sum();
    let mut g = c.benchmark_group("corpus");
    g.throughput(Throughput::Bytes(bytes));

    for workers in [1, 4] {
        g.bench_function(format!("filter/{workers}"), |b| {
            b.iter(|| {
                let kept = apply_filters(docs.iter().cloned().map(Ok), &FilterConfig::default(), workers).unwrap();
                black_box(kept.count())
            })
        });
        g.bench_function(format!("tokenize/{workers}"), |b| {
            let tok = ByteTokenizer::default();
            b.iter(|| {
                let out = tokenize_parallel(docs.iter().cloned().map(Ok), &tok, workers).unwrap();
                black_box(out.count())
            })
        });
    }
    g.bench_function("dedup", |b| {
        b.iter(|| black_box(dedup_stream(docs.iter().cloned().map(Ok)).count()))
    });
    g.finish();
}

fn packing(c: &mut Criterion) {
    let tok = ByteTokenizer::default();
    let docs: Vec<Vec<u32>> = synthetic_corpus(5_000, 11)
        .iter()
        .map(|d| tok.encode_bytes(&d.text))
        .collect();
    let total: u64 = docs.iter().map(|d| d.len() as u64).sum();
    let mut g = c.benchmark_group("pack");
    g.throughput(Throughput::Elements(total));
    g.bench_function("seq_len_2000", |b| {
        b.iter(|| black_box(pack_stream(docs.iter().map(Ok), &PackConfig::default()).unwrap().count()))
    });
    g.finish();
}

fn shards(c: &mut Criterion) {
    let seqs = synthetic_sequences(2_000, 2000, 3);
    let mut g = c.benchmark_group("shard");
    g.sample_size(10);
    g.throughput(Throughput::Elements(seqs.len() as u64 * 2000));
    for codec in [Codec::None, Codec::Deflate] {
        let cfg = ShardWriteConfig { codec, ..Default::default() };
        g.bench_function(format!("write/{codec:?}"), |b| {
            b.iter_batched(
                || tempfile::tempdir().unwrap(),
                |dir| black_box(write_shards(seqs.iter().cloned().map(Ok), dir.path(), &cfg).unwrap()),
                BatchSize::PerIteration,
            )
        });
        let dir = tempfile::tempdir().unwrap();
        write_shards(seqs.iter().cloned().map(Ok), dir.path(), &cfg).unwrap();
        let paths = list_shards(dir.path()).unwrap();
        g.bench_function(format!("read/{codec:?}"), |b| {
            b.iter(|| black_box(stream_read(&paths, &StreamConfig::default()).unwrap().count()))
        });
    }
    g.bench_function("shuffle/buffer_4096", |b| {
        b.iter(|| black_box(shuffle((0..1_000_000u64).map(Ok), 4096, 1).unwrap().count()))
    });
    g.finish();
}

criterion_group!(benches, corpus_stages, packing, shards);
criterion_main!(benches);
