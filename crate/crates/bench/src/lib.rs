//! Synthetic inputs shared by the benchmarks.

use edushard_core::shard::SplitMix64;
use edushard_core::{Document, PackedSequence, TokenId};

/// `n` documents of 4 to 19 lines, roughly a quarter of them exact copies
/// of an earlier document.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = SplitMix64::new(seed);
    let mut docs: Vec<Document> = Vec::with_capacity(n);
    for i in 0..n {
        let r = rng.next_u64();
        let text = if i > 0 && r % 4 == 0 {
            docs[(r >> 8) as usize % i].text.clone()
        } else {
            let lines = 4 + rng.next_u64() % 16;
            (0..lines)
                .map(|_| {
                    let words = 3 + rng.next_u64() % 12;
                    (0..words)
                        .map(|_| format!("word{}", rng.next_u64() % 5000))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        docs.push(Document::new(format!("doc-{i}"), text));
    }
    docs
}

pub fn synthetic_sequences(n: u64, seq_len: usize, seed: u64) -> Vec<PackedSequence> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|ordinal| PackedSequence {
            ordinal,
            tokens: (0..seq_len).map(|_| (rng.next_u64() % 259) as TokenId).collect(),
        })
        .collect()
}
