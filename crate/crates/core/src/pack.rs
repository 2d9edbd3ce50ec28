//! Sequence packing. Documents are concatenated, each followed by a
//! separator when enabled, and the flat stream is cut into sequences of
//! exactly `seq_len` tokens. A final partial chunk is dropped, never padded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::TokenId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PackConfig {
    pub seq_len: usize,
    pub insert_doc_sep: bool,
    pub sep_id: TokenId,
}

impl Default for PackConfig {
    fn default() -> Self {
        Self {
            seq_len: 2000,
            insert_doc_sep: true,
            sep_id: 0,
        }
    }
}

impl PackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seq_len < 2 {
            return Err(Error::Config(format!("pack.seq_len must be >= 2, got {}", self.seq_len)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PackedSequence {
    /// Position in the packed output.
    pub ordinal: u64,
    pub tokens: Vec<TokenId>,
}

/// Streaming packer. Holds at most `seq_len` plus one document of tokens.
pub struct PackStream<I> {
    inner: I,
    cfg: PackConfig,
    buf: Vec<TokenId>,
    next_ordinal: u64,
    flat_len: u64,
    exhausted: bool,
}

pub fn pack_stream<I, T>(docs: I, cfg: &PackConfig) -> Result<PackStream<I::IntoIter>>
where
    I: IntoIterator<Item = Result<T>>,
    T: AsRef<[TokenId]>,
{
    cfg.validate()?;
    Ok(PackStream {
        inner: docs.into_iter(),
        cfg: cfg.clone(),
        buf: Vec::with_capacity(cfg.seq_len * 2),
        next_ordinal: 0,
        flat_len: 0,
        exhausted: false,
    })
}

impl<I> PackStream<I> {
    /// Tokens in the flat stream that did not fill a whole sequence.
    /// Final once the iterator has returned `None`.
    pub fn dropped_tail(&self) -> u64 {
        if self.exhausted {
            self.buf.len() as u64
        } else {
            0
        }
    }

    pub fn flat_len(&self) -> u64 {
        self.flat_len
    }

    pub fn emitted(&self) -> u64 {
        self.next_ordinal
    }
}

impl<I, T> Iterator for PackStream<I>
where
    I: Iterator<Item = Result<T>>,
    T: AsRef<[TokenId]>,
{
    type Item = Result<PackedSequence>;

    fn next(&mut self) -> Option<Self::Item> {
        let l = self.cfg.seq_len;
        while self.buf.len() < l {
            if self.exhausted {
                return None;
            }
            match self.inner.next() {
                Some(Ok(doc)) => {
                    let doc = doc.as_ref();
                    self.buf.extend_from_slice(doc);
                    self.flat_len += doc.len() as u64;
                    if self.cfg.insert_doc_sep {
                        self.buf.push(self.cfg.sep_id);
                        self.flat_len += 1;
                    }
                }
                Some(Err(e)) => return Some(Err(e)),
                None => self.exhausted = true,
            }
        }
        let tokens: Vec<TokenId> = self.buf.drain(..l).collect();
        let ordinal = self.next_ordinal;
        self.next_ordinal += 1;
        Some(Ok(PackedSequence { ordinal, tokens }))
    }
}
