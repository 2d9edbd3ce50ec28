//! Document model and JSONL ingestion.
//!
//! One JSON object per line with keys `id`, `text` and an optional flat
//! `meta` object of strings. Blank lines are skipped. Input must be valid
//! UTF-8; lossy decoding would make hashing and tokenization input-dependent
//! on the decoder.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub meta: IndexMap<String, String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            meta: IndexMap::new(),
        }
    }
}

/// Lazy reader over a JSONL document file.
pub struct DocumentReader<R> {
    reader: R,
    line: usize,
    buf: Vec<u8>,
    done: bool,
}

/// Opens `path` and yields its documents in file order.
pub fn read_documents(path: impl AsRef<Path>) -> Result<DocumentReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(DocumentReader::new(BufReader::new(file)))
}

impl<R: BufRead> DocumentReader<R> {
    pub fn new(reader: R) -> Self {
        Self {
            reader,
            line: 0,
            buf: Vec::new(),
            done: false,
        }
    }

    fn parse_line(&self) -> Result<Document> {
        let line = self.line;
        let text = std::str::from_utf8(&self.buf).map_err(|e| Error::Parse {
            line,
            message: format!("invalid UTF-8: {e}"),
        })?;
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if doc.id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty \"id\"".into(),
            });
        }
        Ok(doc)
    }
}

impl<R: BufRead> Iterator for DocumentReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            self.line += 1;
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    while matches!(self.buf.last(), Some(b'\n' | b'\r')) {
                        self.buf.pop();
                    }
                    if self.buf.iter().all(u8::is_ascii_whitespace) {
                        continue;
                    }
                    let item = self.parse_line();
                    if item.is_err() {
                        self.done = true;
                    }
                    return Some(item);
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::io(PathBuf::from("<input>"), e)));
                }
            }
        }
        None
    }
}

/// Writes one JSON object per line. Fails on the first repeated id.
pub fn write_documents<I>(docs: I, path: impl AsRef<Path>) -> Result<usize>
where
    I: IntoIterator<Item = Result<Document>>,
{
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let n = write_documents_to(docs, &mut out).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    out.flush().map_err(|e| Error::io(path, e))?;
    Ok(n)
}

pub fn write_documents_to<I, W>(docs: I, out: &mut W) -> Result<usize>
where
    I: IntoIterator<Item = Result<Document>>,
    W: Write,
{
    let mut seen = HashSet::new();
    let mut n = 0;
    for doc in docs {
        let doc = doc?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        serde_json::to_writer(&mut *out, &doc).map_err(|e| Error::Invalid(e.to_string()))?;
        out.write_all(b"\n")
            .map_err(|e| Error::io("<output>", e))?;
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub doc_count: u64,
    /// Unicode scalar values, newlines included.
    pub total_chars: u64,
    pub total_nonempty_lines: u64,
    /// Zero for an empty corpus.
    pub mean_doc_chars: f64,
}

impl CorpusStats {
    /// Folds one more document into the running totals.
    pub fn push(&mut self, doc: &Document) {
        self.doc_count += 1;
        self.total_chars += doc.text.chars().count() as u64;
        self.total_nonempty_lines += nonempty_lines(&doc.text).count() as u64;
        self.mean_doc_chars = self.total_chars as f64 / self.doc_count as f64;
    }
}

pub fn corpus_stats<'a, I>(docs: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut stats = CorpusStats::default();
    for doc in docs {
        stats.push(doc);
    }
    stats
}

/// Lines split on `'\n'`, trimmed, with empty-after-trim lines removed.
pub fn nonempty_lines(text: &str) -> impl Iterator<Item = &str> {
    text.split('\n').map(str::trim).filter(|l| !l.is_empty())
}
