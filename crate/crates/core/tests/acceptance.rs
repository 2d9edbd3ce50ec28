//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p edushard-core --test acceptance`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashSet};
use std::io::{Cursor, Read, Seek, SeekFrom};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::rc::Rc;

use indexmap::IndexMap;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use edushard_core::analysis::{
    group_deltas, loss_gap, lr_at, relative_delta, scaling_efficiency, table_average, tokens_per_parameter,
    Aggregation, BenchmarkRow, BenchmarkTable, LossCurve, LrSchedule, TrainRunSpec,
};
use edushard_core::corpus::write_documents_to;
use edushard_core::dedup::{DedupIndex, DedupStream};
use edushard_core::filter::apply_filters;
use edushard_core::pack::pack_stream;
use edushard_core::shard::{
    list_shards, shuffle, stream_read, write_shards, RankStream, ShardReader, SplitMix64,
};
use edushard_core::tokenize::{tokenize_parallel, write_token_file};
use edushard_core::{
    ByteTokenizer, Codec, Document, FilterConfig, PackConfig, PackedSequence, StreamConfig, TokenId, TokenWidth,
    ShardWriteConfig,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

const BENCHMARKS: [&str; 7] = ["MMLU", "ARC-Challenge", "ARC-Easy", "Winogrande", "HellaSwag", "BoolQ", "PIQA"];

fn published_table() -> BenchmarkTable {
    let rows: [(&str, u64, [f64; 7]); 3] = [
        ("base", 0, [0.2304, 0.2432, 0.4146, 0.5241, 0.3816, 0.6034, 0.6513]),
        ("400M", 400_000_000, [0.2364, 0.2568, 0.4398, 0.5114, 0.3989, 0.5804, 0.6518]),
        ("1B", 1_000_000_000, [0.2490, 0.2543, 0.4402, 0.5083, 0.4105, 0.5719, 0.6496]),
    ];
    let mut groups = IndexMap::new();
    groups.insert(
        "educational".to_string(),
        ["MMLU", "ARC-Challenge", "ARC-Easy", "HellaSwag"].map(String::from).to_vec(),
    );
    groups.insert(
        "general".to_string(),
        ["Winogrande", "BoolQ", "PIQA"].map(String::from).to_vec(),
    );
    BenchmarkTable {
        rows: rows
            .iter()
            .map(|(label, tokens, s)| {
                let scores = BENCHMARKS.iter().zip(s).map(|(n, v)| (n.to_string(), *v)).collect();
                (label.to_string(), BenchmarkRow { tokens: *tokens, scores })
            })
            .collect(),
        groups,
        base: "base".into(),
    }
}

fn score(t: &BenchmarkTable, row: &str, bench: &str) -> f64 {
    t.rows[row].scores[bench]
}

fn table_averages() -> Outcome {
    let t = published_table();
    let mut got = Vec::new();
    for (label, want) in [("base", 0.4355), ("400M", 0.4394), ("1B", 0.4405)] {
        let scores: Vec<f64> = t.rows[label].scores.values().copied().collect();
        let avg = table_average(&scores).map_err(|e| e.to_string())?;
        let rounded = format!("{avg:.4}");
        ensure!(rounded == format!("{want:.4}"), "{label}: {rounded} != {want:.4}");
        got.push(rounded);
    }
    Ok(got.join(", "))
}

fn headline_deltas() -> Outcome {
    let t = published_table();
    let mut got = Vec::new();
    for (bench, want) in [("MMLU", 8.1), ("HellaSwag", 7.6), ("ARC-Easy", 6.2), ("Winogrande", -3.0), ("BoolQ", -5.2)] {
        let d = relative_delta(score(&t, "base", bench), score(&t, "1B", bench)).map_err(|e| e.to_string())?;
        // reported values are rounded to one decimal
        ensure!(within(d, want, 0.05), "{bench}: {d:.4} vs {want} (tol 0.05)");
        got.push(format!("{bench} {d:+.2}"));
    }
    Ok(got.join(", "))
}

fn token_ratios() -> Outcome {
    let a = tokens_per_parameter(400_000_000, 125_000_000).map_err(|e| e.to_string())?;
    let b = tokens_per_parameter(1_000_000_000, 125_000_000).map_err(|e| e.to_string())?;
    ensure!(a == 3.2 && b == 8.0, "got {a}, {b}");
    Ok(format!("{a}, {b}"))
}

fn educational_curve() -> Outcome {
    let t = published_table();
    let rom = group_deltas(&t, Aggregation::RatioOfMeans).map_err(|e| e.to_string())?;
    let edu = &rom["educational"];
    // independent recomputation
    let mean = |row: &str| {
        ["MMLU", "ARC-Challenge", "ARC-Easy", "HellaSwag"]
            .iter()
            .map(|b| score(&t, row, b))
            .sum::<f64>()
            / 4.0
    };
    for (label, want) in [("400M", 4.9), ("1B", 6.6)] {
        let oracle = 100.0 * (mean(label) - mean("base")) / mean("base");
        ensure!(within(edu[label], oracle, 1e-9), "{label}: {} vs oracle {oracle}", edu[label]);
        ensure!(within(edu[label], want, 0.05), "{label}: {:.4} vs {want} (tol 0.05)", edu[label]);
    }
    let mor = group_deltas(&t, Aggregation::MeanOfRatios).map_err(|e| e.to_string())?;
    Ok(format!(
        "educational {:+.2}/{:+.2}; general (not asserted) ratio-of-means {:+.2}/{:+.2}, mean-of-ratios {:+.2}/{:+.2}",
        edu["400M"],
        edu["1B"],
        rom["general"]["400M"],
        rom["general"]["1B"],
        mor["general"]["400M"],
        mor["general"]["1B"]
    ))
}

fn final_loss_gap() -> Outcome {
    let a = LossCurve::new("400M", vec![(0, 2.35), (1000, 2.12)]).map_err(|e| e.to_string())?;
    let b = LossCurve::new("1B", vec![(0, 2.35), (1000, 2.03)]).map_err(|e| e.to_string())?;
    let g = loss_gap(&a, &b).map_err(|e| e.to_string())?;
    ensure!(within(g.relative_gap_percent, 100.0 * 0.09 / 2.12, 1e-9), "gap {}", g.relative_gap_percent);
    ensure!(within(g.relative_gap_percent, 4.2, 0.1), "gap {:.4} vs 4.2 (tol 0.1)", g.relative_gap_percent);
    Ok(format!("{:.2}%", g.relative_gap_percent))
}

fn scaling() -> Outcome {
    let run = |label: &str, tokens, world_size, wall_hours| TrainRunSpec {
        label: label.into(),
        tokens,
        world_size,
        wall_hours,
        ..Default::default()
    };
    let s = scaling_efficiency(&run("400M", 400_000_000, 3, 3.0), &run("1B", 1_000_000_000, 6, 4.0))
        .map_err(|e| e.to_string())?;
    ensure!(within(s.efficiency, 0.9375, 1e-12), "efficiency {}", s.efficiency);
    // 150% more data for 33% more wall time
    ensure!(within(4.0 / 3.0 - 1.0, 0.33, 0.005), "time ratio");
    Ok(format!("{:.4}", s.efficiency))
}

fn lr_schedule() -> Outcome {
    let s = LrSchedule::default();
    let lr = |step| lr_at(step, &s).map_err(|e| e.to_string());
    let w = s.warmup_steps();
    ensure!(w == 100, "warmup {w}");
    ensure!(lr(0)? == 0.0, "lr(0) = {}", lr(0)?);
    ensure!(lr(w)? == 1e-4, "lr(warmup) = {}", lr(w)?);
    ensure!(within(lr(s.total_steps)?, s.floor_lr, 1e-18), "lr(total) = {}", lr(s.total_steps)?);
    let step = 1e-4 / w as f64;
    ensure!(within(lr(w - 1)?, lr(w)?, 1.0001 * step), "warmup side jump");
    ensure!(within(lr(w + 1)?, lr(w)?, 1e-8), "decay side jump");
    let mid = w + (s.total_steps - w) / 2;
    ensure!(within(lr(mid)?, 0.5e-4, 1e-15), "midpoint {}", lr(mid)?);
    let floored = LrSchedule { floor_lr: 1e-5, ..s };
    let end = lr_at(floored.total_steps, &floored).map_err(|e| e.to_string())?;
    ensure!(within(end, 1e-5, 1e-18), "floored end {end}");
    Ok(format!("warmup {w}, mid {:.3e}", lr(mid)?))
}

// -- dedup ------------------------------------------------------------------

fn oracle_canonical(text: &str) -> String {
    let mut lines: Vec<&str> = text.split('\n').map(|l| l.trim_end()).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    let skip = lines.iter().take_while(|l| l.is_empty()).count();
    lines[skip..].join("\n")
}

/// Keep-first by pairwise comparison against every kept document.
fn dedup_oracle(docs: &[Document]) -> Vec<String> {
    let mut kept: Vec<(String, String)> = Vec::new();
    for d in docs {
        let c = oracle_canonical(&d.text);
        if !kept.iter().any(|(_, k)| *k == c) {
            kept.push((d.id.clone(), c));
        }
    }
    kept.into_iter().map(|(id, _)| id).collect()
}

const WORDS: [&str; 8] = ["alpha", "beta", "gamma", "delta", "sigma", "omega", "kappa", "theta"];

fn random_text(rng: &mut StdRng) -> String {
    let lines = rng.gen_range(1..=4);
    (0..lines)
        .map(|_| {
            let n = rng.gen_range(1..=5);
            (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn variant(rng: &mut StdRng, text: &str) -> String {
    match rng.gen_range(0..5) {
        0 => text.to_string(),
        1 => format!("\n\n{text}\n  \n"),
        2 => text.split('\n').map(|l| format!("{l} \t")).collect::<Vec<_>>().join("\n"),
        // near duplicates: must survive
        3 => format!("{text}."),
        _ => format!(" {text}"),
    }
}

fn random_corpus(rng: &mut StdRng, n: usize, dup_rate: f64) -> Vec<Document> {
    let mut docs: Vec<Document> = Vec::with_capacity(n);
    for i in 0..n {
        let text = if !docs.is_empty() && rng.gen_bool(dup_rate) {
            let src = &docs[rng.gen_range(0..docs.len())].text;
            variant(rng, src)
        } else {
            random_text(rng)
        };
        docs.push(Document::new(format!("d{i}"), text));
    }
    docs
}

fn run_dedup<H: edushard_core::dedup::TextHasher>(docs: &[Document], index: DedupIndex<H>) -> Result<Vec<String>, String> {
    DedupStream::new(docs.iter().cloned().map(Ok), index)
        .map(|d| d.map(|d| d.id).map_err(|e| e.to_string()))
        .collect()
}

fn dedup_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xDED0);
    let (mut corpora, mut weak_runs, mut spill_runs, mut largest) = (0, 0, 0, 0);
    for i in 0..100 {
        let n = if i % 20 == 0 { 10_000 } else { rng.gen_range(1..=2_000) };
        let dup_rate = 0.9 * i as f64 / 99.0;
        let docs = random_corpus(&mut rng, n, dup_rate);
        let want = dedup_oracle(&docs);
        let got = run_dedup(&docs, DedupIndex::new())?;
        ensure!(got == want, "corpus {i} (n={n}, dup {dup_rate:.2}): {} kept vs oracle {}", got.len(), want.len());
        if i % 4 == 0 {
            // every text lands in one of four buckets
            let weak = |t: &str| (t.len() % 4) as u128;
            let got = run_dedup(&docs, DedupIndex::with_hasher(weak))?;
            ensure!(got == want, "corpus {i}: weak hash diverged");
            weak_runs += 1;
        }
        if i % 10 == 0 {
            let got = run_dedup(&docs, DedupIndex::new().memory_budget(256))?;
            ensure!(got == want, "corpus {i}: spilled index diverged");
            spill_runs += 1;
        }
        corpora += 1;
        largest = largest.max(n);
    }
    Ok(format!("{corpora} corpora (max {largest} docs), {weak_runs} weak-hash, {spill_runs} spilled"))
}

// -- packing ----------------------------------------------------------------

fn packing_invariants() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x9AC);
    for case in 0..300 {
        let n = rng.gen_range(0..40);
        let docs: Vec<Vec<TokenId>> = (0..n)
            .map(|_| (0..rng.gen_range(0..60)).map(|_| rng.gen_range(3..259)).collect())
            .collect();
        let cfg = PackConfig {
            seq_len: rng.gen_range(2..70),
            insert_doc_sep: rng.gen_bool(0.5),
            sep_id: 0,
        };
        let mut flat = Vec::new();
        for d in &docs {
            flat.extend_from_slice(d);
            if cfg.insert_doc_sep {
                flat.push(cfg.sep_id);
            }
        }
        let l = cfg.seq_len as usize;
        let mut packer = pack_stream(docs.iter().cloned().map(Ok), &cfg).map_err(|e| e.to_string())?;
        let seqs: Vec<PackedSequence> = packer.by_ref().collect::<edushard_core::Result<_>>().map_err(|e| e.to_string())?;
        let want: Vec<&[TokenId]> = flat.chunks_exact(l).collect();
        ensure!(seqs.len() == want.len(), "case {case}: {} seqs vs {}", seqs.len(), want.len());
        for (k, (s, w)) in seqs.iter().zip(&want).enumerate() {
            ensure!(s.tokens.len() == l, "case {case}: length {}", s.tokens.len());
            ensure!(s.ordinal == k as u64 && s.tokens == *w, "case {case}: sequence {k} differs");
        }
        ensure!(
            seqs.len() as u64 * cfg.seq_len as u64 + packer.dropped_tail() == flat.len() as u64,
            "case {case}: count*L + tail != flat"
        );
        ensure!(packer.flat_len() == flat.len() as u64, "case {case}: flat_len");
    }
    Ok("300 random corpora".into())
}

// -- shards -----------------------------------------------------------------

fn random_seqs(rng: &mut StdRng, n: u64, len: usize, max: u32) -> Vec<PackedSequence> {
    (0..n)
        .map(|ordinal| PackedSequence {
            ordinal,
            tokens: (0..len).map(|_| rng.gen_range(0..=max)).collect(),
        })
        .collect()
}

#[derive(Clone)]
struct Recording {
    inner: Cursor<Vec<u8>>,
    reads: Rc<RefCell<Vec<(u64, u64)>>>,
}

impl Read for Recording {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let start = self.inner.position();
        let n = self.inner.read(buf)?;
        if n > 0 {
            self.reads.borrow_mut().push((start, start + n as u64));
        }
        Ok(n)
    }
}

impl Seek for Recording {
    fn seek(&mut self, pos: SeekFrom) -> std::io::Result<u64> {
        self.inner.seek(pos)
    }
}

fn shard_roundtrip_partition() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5AAD);
    let mut checked_reads = 0usize;
    for codec in [Codec::None, Codec::Deflate] {
        for width in [TokenWidth::Two, TokenWidth::Four] {
            let max = if width == TokenWidth::Two { u16::MAX as u32 } else { u32::MAX };
            let n = rng.gen_range(30..90);
            let seqs = random_seqs(&mut rng, n, 16, max);
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let cfg = ShardWriteConfig {
                max_seqs_per_shard: rng.gen_range(5..40),
                frame_size: rng.gen_range(1..8),
                codec,
                token_width: width,
                write_empty: false,
            };
            write_shards(seqs.iter().cloned().map(Ok), dir.path(), &cfg).map_err(|e| e.to_string())?;
            let paths = list_shards(dir.path()).map_err(|e| e.to_string())?;
            let tag = format!("{codec:?}/{width:?}");

            let back: Vec<PackedSequence> = stream_read(&paths, &StreamConfig::default())
                .map_err(|e| e.to_string())?
                .collect::<edushard_core::Result<_>>()
                .map_err(|e| e.to_string())?;
            ensure!(back == seqs, "{tag}: roundtrip differs");

            let files: Vec<Vec<u8>> = paths.iter().map(std::fs::read).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            for world in [1u32, 2, 3, 5, 8] {
                let mut seen = BTreeMap::new();
                for rank in 0..world {
                    let mut readers = Vec::new();
                    let mut logs = Vec::new();
                    for (p, bytes) in paths.iter().zip(&files) {
                        let reads = Rc::new(RefCell::new(Vec::new()));
                        let src = Recording { inner: Cursor::new(bytes.clone()), reads: reads.clone() };
                        readers.push(ShardReader::from_reader(src, p).map_err(|e| e.to_string())?);
                        logs.push(reads);
                    }
                    let ranges: Vec<(u64, Vec<(u64, u64)>)> = readers
                        .iter()
                        .map(|r| {
                            let fc = r.header().frame_count();
                            (r.header().encoded_len(), (0..fc).map(|i| r.frame_range(i)).collect())
                        })
                        .collect();
                    for l in &logs {
                        l.borrow_mut().clear();
                    }
                    let mut stream = RankStream::new(readers, rank, world).map_err(|e| e.to_string())?;
                    for s in stream.by_ref() {
                        let s = s.map_err(|e| e.to_string())?;
                        ensure!(seen.insert(s.ordinal, s.tokens).is_none(), "{tag} w{world}: ordinal seen twice");
                    }
                    let own: Vec<u64> = stream.assigned_frames().collect();
                    ensure!(stream.decoded_frames() == own.as_slice(), "{tag} w{world} r{rank}: decoded foreign frames");
                    // map each byte read back to the global frame containing it
                    let mut global = 0u64;
                    for (reads, (header_len, frames)) in logs.iter().zip(&ranges) {
                        for &(a, b) in reads.borrow().iter() {
                            let hit = frames.iter().position(|&(s, e)| a >= s && b <= e);
                            match hit {
                                Some(f) => ensure!(
                                    (global + f as u64) % world as u64 == rank as u64,
                                    "{tag} w{world} r{rank}: read bytes {a}..{b} of foreign frame"
                                ),
                                None => ensure!(b <= *header_len, "{tag} w{world} r{rank}: stray read {a}..{b}"),
                            }
                            checked_reads += 1;
                        }
                        global += frames.len() as u64;
                    }
                }
                let all: Vec<PackedSequence> = seen.into_iter().map(|(ordinal, tokens)| PackedSequence { ordinal, tokens }).collect();
                ensure!(all == seqs, "{tag} w{world}: union differs from corpus");
            }
        }
    }
    Ok(format!("4 codec/width combos, world sizes 1,2,3,5,8, {checked_reads} reads audited"))
}

// -- shuffle ----------------------------------------------------------------

fn shuffle_contract() -> Outcome {
    let mut g = SplitMix64::new(1234567);
    let want = [
        6457827717110365317u64,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ];
    for (k, w) in want.iter().enumerate() {
        let got = g.next_u64();
        ensure!(got == *w, "SplitMix64 output {k}: {got} != {w}");
    }
    let run = |n: usize, buf: usize, seed: u64| -> Result<Vec<usize>, String> {
        shuffle((0..n).map(Ok), buf, seed)
            .map_err(|e| e.to_string())?
            .collect::<edushard_core::Result<Vec<_>>>()
            .map_err(|e| e.to_string())
    };
    let mut rng = StdRng::seed_from_u64(0x5F1E);
    for case in 0..200 {
        let n = rng.gen_range(0..500);
        let buf = rng.gen_range(1..64);
        let seed = rng.gen();
        let out = run(n, buf, seed)?;
        let mut sorted = out.clone();
        sorted.sort_unstable();
        ensure!(sorted == (0..n).collect::<Vec<_>>(), "case {case}: not a permutation");
        ensure!(out == run(n, buf, seed)?, "case {case}: not reproducible");
        for (pos, &item) in out.iter().enumerate() {
            ensure!(item < pos + buf, "case {case}: item {item} emitted at {pos} with buffer {buf}");
        }
        ensure!(run(n, 1, seed)? == (0..n).collect::<Vec<_>>(), "case {case}: buffer 1 is not identity");
    }
    let distinct = (0..100u64)
        .filter(|s| run(1000, 256, *s).ok() != run(1000, 256, s + 1000).ok())
        .count();
    ensure!(distinct >= 99, "only {distinct}/100 seed pairs differ");
    Ok("SplitMix64 vectors, 200 random cases".into())
}

// -- parallel determinism ---------------------------------------------------

fn fixture_corpus(n: usize) -> Vec<Document> {
    let mut rng = StdRng::seed_from_u64(0xF1C5);
    (0..n)
        .map(|i| {
            let lines = rng.gen_range(0..12);
            let text = (0..lines)
                .map(|_| {
                    let words = rng.gen_range(0..9);
                    (0..words)
                        .map(|_| {
                            if rng.gen_bool(0.05) {
                                "naïve café ☕".to_string()
                            } else {
                                format!("w{}", rng.gen_range(0..300))
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n");
            Document::new(format!("doc-{i}"), text)
        })
        .collect()
}

fn parallel_determinism() -> Outcome {
    let docs = fixture_corpus(10_000);
    let tokenizer = ByteTokenizer::default();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut token_files = Vec::new();
    let mut filter_outputs = Vec::new();
    for workers in [1usize, 2, 8] {
        let path = dir.path().join(format!("tokens-{workers}.bin"));
        let tokens = tokenize_parallel(docs.iter().cloned().map(Ok), &tokenizer, workers).map_err(|e| e.to_string())?;
        write_token_file(tokens.map(|d| d.map(|d| d.tokens)), &path).map_err(|e| e.to_string())?;
        token_files.push(std::fs::read(&path).map_err(|e| e.to_string())?);

        let mut kept = apply_filters(docs.iter().cloned().map(Ok), &FilterConfig::default(), workers)
            .map_err(|e| e.to_string())?;
        let mut bytes = Vec::new();
        write_documents_to(kept.by_ref(), &mut bytes).map_err(|e| e.to_string())?;
        filter_outputs.push((bytes, kept.report()));
    }
    ensure!(token_files.iter().all(|f| *f == token_files[0]), "token files differ across worker counts");
    ensure!(filter_outputs.iter().all(|f| *f == filter_outputs[0]), "filter output differs across worker counts");
    let ids: HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    ensure!(ids.len() == docs.len(), "fixture ids not unique");
    Ok(format!(
        "workers 1,2,8: {} token bytes, {} kept-doc bytes",
        token_files[0].len(),
        filter_outputs[0].0.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("table averages", table_averages),
        ("headline deltas", headline_deltas),
        ("tokens per parameter", token_ratios),
        ("educational group curve", educational_curve),
        ("final loss gap", final_loss_gap),
        ("scaling efficiency", scaling),
        ("lr schedule", lr_schedule),
        ("dedup oracle equivalence", dedup_equivalence),
        ("packing invariants", packing_invariants),
        ("shard roundtrip and partition", shard_roundtrip_partition),
        ("shuffle contract", shuffle_contract),
        ("determinism under parallelism", parallel_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
