//! Corpus preparation and analysis toolkit for continued pre-training.
//!
//! The data path runs `corpus` → `filter` → `dedup` → `tokenize` → `pack` →
//! `shard`. Every stage is a lazy iterator adapter over `Result` items so a
//! corpus never has to fit in memory, and errors surface at the point of use.
//! The `analysis` module holds the cost models and benchmark-table analytics.

pub mod analysis;
pub mod corpus;
pub mod dedup;
pub mod error;
pub mod filter;
pub mod pack;
mod par;
pub mod shard;
pub mod tokenize;

pub use corpus::{CorpusStats, Document};
pub use error::{Error, Result};
pub use filter::{FilterConfig, FilterReason, FilterReport, FilterVerdict};
pub use pack::{PackConfig, PackedSequence};
pub use shard::{Codec, ShardHeader, ShardWriteConfig, StreamConfig, TokenWidth};
pub use tokenize::{ByteTokenizer, Encoder, TokenId, TokenizedDoc, TokenizerSpec};
