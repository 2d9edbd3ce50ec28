//! Exact document-level deduplication.
//!
//! Documents are keyed by a 128-bit hash of their canonical text; a hash hit
//! is only treated as a duplicate after the full canonical texts compare
//! equal, so the result matches plain string comparison. The earliest
//! document wins.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};

use serde::Serialize;

use crate::corpus::Document;
use crate::error::{Error, Result};

/// Strips trailing whitespace from every line and drops leading and trailing
/// blank lines. Interior content is left byte-for-byte intact.
pub fn canonicalize(text: &str) -> String {
    let lines: Vec<&str> = text.split('\n').map(str::trim_end).collect();
    let start = lines.iter().position(|l| !l.is_empty());
    let Some(start) = start else {
        return String::new();
    };
    let end = lines.iter().rposition(|l| !l.is_empty()).unwrap_or(start);
    lines[start..=end].join("\n")
}

pub trait TextHasher {
    fn hash128(&self, text: &str) -> u128;
}

/// XXH3, 128-bit variant.
#[derive(Debug, Clone, Copy, Default)]
pub struct Xxh3Hasher;

impl TextHasher for Xxh3Hasher {
    fn hash128(&self, text: &str) -> u128 {
        xxhash_rust::xxh3::xxh3_128(text.as_bytes())
    }
}

impl<F: Fn(&str) -> u128> TextHasher for F {
    fn hash128(&self, text: &str) -> u128 {
        self(text)
    }
}

#[derive(Debug)]
enum TextHandle {
    Memory(String),
    Spilled { offset: u64, len: usize },
}

#[derive(Debug)]
struct Entry {
    ordinal: u64,
    id: String,
    text: TextHandle,
}

/// Canonical texts of kept documents. Texts stay in memory until the budget
/// is spent; after that they are appended to an anonymous spill file and
/// read back only when a hash hit needs verifying.
#[derive(Debug)]
struct TextStore {
    budget: usize,
    in_memory: usize,
    spill: Option<File>,
    spill_len: u64,
}

impl TextStore {
    fn put(&mut self, text: String) -> Result<TextHandle> {
        if self.in_memory + text.len() <= self.budget {
            self.in_memory += text.len();
            return Ok(TextHandle::Memory(text));
        }
        let file = match &mut self.spill {
            Some(f) => f,
            None => self
                .spill
                .insert(tempfile::tempfile().map_err(|e| Error::io("<dedup spill>", e))?),
        };
        file.seek(SeekFrom::Start(self.spill_len))
            .and_then(|_| file.write_all(text.as_bytes()))
            .map_err(|e| Error::io("<dedup spill>", e))?;
        let handle = TextHandle::Spilled {
            offset: self.spill_len,
            len: text.len(),
        };
        self.spill_len += text.len() as u64;
        Ok(handle)
    }

    fn equals(&mut self, handle: &TextHandle, text: &str) -> Result<bool> {
        match handle {
            TextHandle::Memory(s) => Ok(s == text),
            TextHandle::Spilled { offset, len } => {
                if *len != text.len() {
                    return Ok(false);
                }
                let file = self.spill.as_mut().expect("spilled handle without spill file");
                let mut buf = vec![0u8; *len];
                file.seek(SeekFrom::Start(*offset))
                    .and_then(|_| file.read_exact(&mut buf))
                    .map_err(|e| Error::io("<dedup spill>", e))?;
                Ok(buf == text.as_bytes())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DropRecord {
    pub dropped_id: String,
    pub kept_id: String,
}

/// Hash → kept-document index with exact verification on every hit.
#[derive(Debug)]
pub struct DedupIndex<H = Xxh3Hasher> {
    hasher: H,
    seen: HashMap<u128, Vec<Entry>>,
    store: TextStore,
    kept_count: u64,
    dropped_count: u64,
}

pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

impl DedupIndex<Xxh3Hasher> {
    pub fn new() -> Self {
        Self::with_hasher(Xxh3Hasher)
    }
}

impl Default for DedupIndex<Xxh3Hasher> {
    fn default() -> Self {
        Self::new()
    }
}

impl<H: TextHasher> DedupIndex<H> {
    pub fn with_hasher(hasher: H) -> Self {
        Self {
            hasher,
            seen: HashMap::new(),
            store: TextStore {
                budget: DEFAULT_MEMORY_BUDGET,
                in_memory: 0,
                spill: None,
                spill_len: 0,
            },
            kept_count: 0,
            dropped_count: 0,
        }
    }

    /// Bytes of canonical text held in memory before spilling to disk.
    pub fn memory_budget(mut self, bytes: usize) -> Self {
        self.store.budget = bytes;
        self
    }

    pub fn kept_count(&self) -> u64 {
        self.kept_count
    }

    pub fn dropped_count(&self) -> u64 {
        self.dropped_count
    }

    /// Admits `doc`. Returns the id of the earlier document it duplicates,
    /// or `None` if it is new and was recorded.
    pub fn admit(&mut self, doc: &Document) -> Result<Option<String>> {
        let canon = canonicalize(&doc.text);
        let key = self.hasher.hash128(&canon);
        let ordinal = self.kept_count + self.dropped_count;
        if let Some(bucket) = self.seen.get(&key) {
            for entry in bucket {
                if self.store.equals(&entry.text, &canon)? {
                    self.dropped_count += 1;
                    return Ok(Some(entry.id.clone()));
                }
            }
        }
        let text = self.store.put(canon)?;
        self.seen.entry(key).or_default().push(Entry {
            ordinal,
            id: doc.id.clone(),
            text,
        });
        self.kept_count += 1;
        Ok(None)
    }

    /// Number of hash buckets holding more than one distinct text.
    pub fn collision_buckets(&self) -> usize {
        self.seen.values().filter(|b| b.len() > 1).count()
    }

    /// Ordinals of kept documents in admission order.
    pub fn kept_ordinals(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.seen.values().flatten().map(|e| e.ordinal).collect();
        v.sort_unstable();
        v
    }
}

/// Streaming keep-first dedup. `dropped()` is final once exhausted.
pub struct DedupStream<I, H = Xxh3Hasher> {
    inner: I,
    index: DedupIndex<H>,
    audit: Option<Vec<DropRecord>>,
}

pub fn dedup_stream<I>(docs: I) -> DedupStream<I::IntoIter>
where
    I: IntoIterator<Item = Result<Document>>,
{
    DedupStream::new(docs, DedupIndex::new())
}

impl<I, H> DedupStream<I, H>
where
    I: Iterator<Item = Result<Document>>,
    H: TextHasher,
{
    pub fn new(docs: impl IntoIterator<IntoIter = I>, index: DedupIndex<H>) -> Self {
        Self {
            inner: docs.into_iter(),
            index,
            audit: None,
        }
    }

    /// Records a (dropped, kept) id pair for every dropped document.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn dropped(&self) -> u64 {
        self.index.dropped_count()
    }

    pub fn index(&self) -> &DedupIndex<H> {
        &self.index
    }

    pub fn audit(&self) -> &[DropRecord] {
        self.audit.as_deref().unwrap_or(&[])
    }
}

impl<I, H> Iterator for DedupStream<I, H>
where
    I: Iterator<Item = Result<Document>>,
    H: TextHasher,
{
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let doc = match self.inner.next()? {
                Ok(d) => d,
                Err(e) => return Some(Err(e)),
            };
            match self.index.admit(&doc) {
                Ok(None) => return Some(Ok(doc)),
                Ok(Some(kept_id)) => {
                    if let Some(audit) = &mut self.audit {
                        audit.push(DropRecord {
                            dropped_id: doc.id,
                            kept_id,
                        });
                    }
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}
