//! Compressed, frame-seekable shard files and the distributed streaming
//! reader.
//!
//! Frames are numbered globally across the ordered shard list and rank `r`
//! of `world_size` reads exactly the frames whose global index is congruent
//! to `r`. Only those frames are ever read from disk or decompressed.

mod format;
mod reader;
mod shuffle;
mod writer;

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufReader, Read, Seek};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use format::{Codec, ShardHeader, TokenWidth, EXTENSION, FIXED_HEADER_LEN, MAGIC, VERSION};
pub use reader::ShardReader;
pub use shuffle::{shuffle, Shuffle, SplitMix64};
pub use writer::{shard_file_name, write_shards, ShardWriteConfig, ShardWriter, DEFLATE_LEVEL};

use crate::error::{Error, Result};
use crate::pack::PackedSequence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamConfig {
    pub rank: u32,
    pub world_size: u32,
    /// 0 disables shuffling.
    pub shuffle_buffer: usize,
    pub seed: u64,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            rank: 0,
            world_size: 1,
            shuffle_buffer: 0,
            seed: 0,
        }
    }
}

impl StreamConfig {
    pub fn validate(&self) -> Result<()> {
        if self.world_size == 0 {
            return Err(Error::Config("world_size must be >= 1".into()));
        }
        if self.rank >= self.world_size {
            return Err(Error::Config(format!(
                "rank {} out of range for world_size {}",
                self.rank, self.world_size
            )));
        }
        Ok(())
    }
}

/// Sorted `*.edsh` files in `dir`.
pub fn list_shards(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == EXTENSION))
        .collect();
    paths.sort();
    Ok(paths)
}

struct ShardCursor<R> {
    reader: ShardReader<R>,
    first_frame: u64,
    first_ordinal: u64,
}

/// Sequences of one rank, in global frame order.
pub struct RankStream<R> {
    shards: Vec<ShardCursor<R>>,
    rank: u64,
    world_size: u64,
    total_frames: u64,
    next_frame: u64,
    ready: VecDeque<PackedSequence>,
    decoded: Vec<u64>,
    failed: bool,
}

impl<R: Read + Seek> RankStream<R> {
    /// Builds a stream over already-opened shards, given in global order.
    pub fn new(readers: Vec<ShardReader<R>>, rank: u32, world_size: u32) -> Result<Self> {
        StreamConfig {
            rank,
            world_size,
            ..Default::default()
        }
        .validate()?;
        let mut seq_len = None;
        let mut shards = Vec::with_capacity(readers.len());
        let (mut frames, mut ordinals) = (0u64, 0u64);
        for reader in readers {
            let h = reader.header();
            if h.num_sequences > 0 {
                match seq_len {
                    None => seq_len = Some(h.seq_len),
                    Some(l) if l != h.seq_len => {
                        return Err(Error::format(
                            reader.path(),
                            format!("seq_len {} differs from earlier shards ({l})", h.seq_len),
                        ))
                    }
                    Some(_) => {}
                }
            }
            let (fc, n) = (h.frame_count(), h.num_sequences);
            shards.push(ShardCursor {
                reader,
                first_frame: frames,
                first_ordinal: ordinals,
            });
            frames += fc;
            ordinals += n;
        }
        Ok(Self {
            shards,
            rank: rank as u64,
            world_size: world_size as u64,
            total_frames: frames,
            next_frame: rank as u64,
            ready: VecDeque::new(),
            decoded: Vec::new(),
            failed: false,
        })
    }

    /// Global indices of the frames decoded so far.
    pub fn decoded_frames(&self) -> &[u64] {
        &self.decoded
    }

    pub fn total_frames(&self) -> u64 {
        self.total_frames
    }

    /// Frames owned by this rank.
    pub fn assigned_frames(&self) -> impl Iterator<Item = u64> {
        (self.rank..self.total_frames).step_by(self.world_size as usize)
    }

    fn load(&mut self, global: u64) -> Result<()> {
        let at = self.shards.partition_point(|s| s.first_frame <= global) - 1;
        let shard = &mut self.shards[at];
        let local = global - shard.first_frame;
        let frame = shard.reader.read_frame(local)?;
        let base = shard.first_ordinal + local * shard.reader.header().frame_size as u64;
        self.ready.extend(frame.into_iter().enumerate().map(|(j, tokens)| PackedSequence {
            ordinal: base + j as u64,
            tokens,
        }));
        self.decoded.push(global);
        Ok(())
    }
}

impl<R: Read + Seek> Iterator for RankStream<R> {
    type Item = Result<PackedSequence>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.ready.is_empty() {
            if self.failed || self.next_frame >= self.total_frames {
                return None;
            }
            let global = self.next_frame;
            self.next_frame += self.world_size;
            if let Err(e) = self.load(global) {
                self.failed = true;
                return Some(Err(e));
            }
        }
        self.ready.pop_front().map(Ok)
    }
}

/// Opens `paths` (in the given global order) and streams the sequences
/// assigned to `cfg.rank`, shuffled when `cfg.shuffle_buffer > 0`.
pub fn stream_read<P: AsRef<Path>>(
    paths: &[P],
    cfg: &StreamConfig,
) -> Result<Box<dyn Iterator<Item = Result<PackedSequence>>>> {
    cfg.validate()?;
    let readers = paths
        .iter()
        .map(ShardReader::open)
        .collect::<Result<Vec<ShardReader<BufReader<File>>>>>()?;
    let stream = RankStream::new(readers, cfg.rank, cfg.world_size)?;
    if cfg.shuffle_buffer == 0 {
        Ok(Box::new(stream))
    } else {
        Ok(Box::new(shuffle(stream, cfg.shuffle_buffer, cfg.seed)?))
    }
}
