use std::fs::{self, File};
use std::io::{self, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use super::format::{Codec, ShardHeader, TokenWidth, EXTENSION};
use crate::error::{Error, Result};
use crate::pack::PackedSequence;

/// Fixed so that repeated runs produce byte-identical shards.
pub const DEFLATE_LEVEL: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShardWriteConfig {
    pub max_seqs_per_shard: u64,
    /// Sequences per frame.
    pub frame_size: u32,
    pub codec: Codec,
    pub token_width: TokenWidth,
    /// Write a single header-only shard when there is nothing to store.
    pub write_empty: bool,
}

impl Default for ShardWriteConfig {
    fn default() -> Self {
        Self {
            max_seqs_per_shard: 16_384,
            frame_size: 64,
            codec: Codec::Deflate,
            token_width: TokenWidth::Four,
            write_empty: false,
        }
    }
}

impl ShardWriteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_size == 0 {
            return Err(Error::Config("shard.frame_size must be >= 1".into()));
        }
        if self.max_seqs_per_shard == 0 {
            return Err(Error::Config("shard.max_seqs_per_shard must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn shard_file_name(index: usize) -> String {
    format!("shard-{index:05}.{EXTENSION}")
}

struct OpenShard {
    body: File,
    body_len: u64,
    rel_offsets: Vec<u64>,
    num_sequences: u64,
}

/// Incremental shard writer. Frames are staged in an anonymous temporary
/// file; the header is written once the frame table is known.
pub struct ShardWriter {
    dir: PathBuf,
    cfg: ShardWriteConfig,
    seq_len: Option<u32>,
    frame: Vec<u8>,
    frame_seqs: u32,
    current: Option<OpenShard>,
    written: Vec<PathBuf>,
}

impl ShardWriter {
    pub fn new(dir: impl AsRef<Path>, cfg: &ShardWriteConfig) -> Result<Self> {
        cfg.validate()?;
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            cfg: cfg.clone(),
            seq_len: None,
            frame: Vec::new(),
            frame_seqs: 0,
            current: None,
            written: Vec::new(),
        })
    }

    pub fn push(&mut self, seq: &PackedSequence) -> Result<()> {
        let len = u32::try_from(seq.tokens.len())
            .map_err(|_| Error::Invalid("sequence longer than u32::MAX".into()))?;
        match self.seq_len {
            None => self.seq_len = Some(len),
            Some(l) if l != len => {
                return Err(Error::Invalid(format!(
                    "sequence {} has {len} tokens, expected {l}",
                    seq.ordinal
                )))
            }
            Some(_) => {}
        }
        let width = self.cfg.token_width;
        for &t in &seq.tokens {
            if t > width.max_token() {
                return Err(Error::TokenOverflow { token: t, width: width.bytes() });
            }
            match width {
                TokenWidth::Two => self.frame.extend_from_slice(&(t as u16).to_le_bytes()),
                TokenWidth::Four => self.frame.extend_from_slice(&t.to_le_bytes()),
            }
        }
        self.frame_seqs += 1;

        if self.current.is_none() {
            let body = tempfile::tempfile_in(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
            self.current = Some(OpenShard {
                body,
                body_len: 0,
                rel_offsets: Vec::new(),
                num_sequences: 0,
            });
        }
        let shard = self.current.as_mut().unwrap();
        shard.num_sequences += 1;
        let shard_full = shard.num_sequences == self.cfg.max_seqs_per_shard;
        if self.frame_seqs == self.cfg.frame_size || shard_full {
            self.flush_frame()?;
        }
        if shard_full {
            self.finish_shard()?;
        }
        Ok(())
    }

    fn flush_frame(&mut self) -> Result<()> {
        if self.frame_seqs == 0 {
            return Ok(());
        }
        let bytes = match self.cfg.codec {
            Codec::None => std::mem::take(&mut self.frame),
            Codec::Deflate => {
                let mut enc = DeflateEncoder::new(Vec::new(), Compression::new(DEFLATE_LEVEL));
                enc.write_all(&self.frame)
                    .and_then(|_| enc.finish())
                    .map_err(|e| Error::io(&self.dir, e))?
            }
        };
        self.frame.clear();
        self.frame_seqs = 0;
        let shard = self.current.as_mut().expect("frame without open shard");
        shard.rel_offsets.push(shard.body_len);
        shard.body.write_all(&bytes).map_err(|e| Error::io(&self.dir, e))?;
        shard.body_len += bytes.len() as u64;
        Ok(())
    }

    fn finish_shard(&mut self) -> Result<()> {
        let Some(mut shard) = self.current.take() else {
            return Ok(());
        };
        let mut header = ShardHeader {
            seq_len: self.seq_len.unwrap_or(0),
            token_width: self.cfg.token_width,
            codec: self.cfg.codec,
            frame_size: self.cfg.frame_size,
            num_sequences: shard.num_sequences,
            frame_offsets: Vec::new(),
        };
        let base = ShardHeader {
            frame_offsets: vec![0; shard.rel_offsets.len()],
            ..header.clone()
        }
        .encoded_len();
        header.frame_offsets = shard.rel_offsets.iter().map(|o| o + base).collect();

        let path = self.dir.join(shard_file_name(self.written.len()));
        let io = |e| Error::io(&path, e);
        let mut out = BufWriter::new(File::create(&path).map_err(io)?);
        out.write_all(&header.encode()).map_err(io)?;
        shard.body.seek(SeekFrom::Start(0)).map_err(io)?;
        io::copy(&mut shard.body, &mut out).map_err(io)?;
        out.flush().map_err(io)?;
        self.written.push(path);
        Ok(())
    }

    /// Flushes the open frame and shard and returns every file written.
    pub fn finish(mut self) -> Result<Vec<PathBuf>> {
        self.flush_frame()?;
        self.finish_shard()?;
        if self.written.is_empty() && self.cfg.write_empty {
            self.current = Some(OpenShard {
                body: tempfile::tempfile_in(&self.dir).map_err(|e| Error::io(&self.dir, e))?,
                body_len: 0,
                rel_offsets: Vec::new(),
                num_sequences: 0,
            });
            self.finish_shard()?;
        }
        Ok(self.written)
    }
}

/// Writes `seqs` as `shard-00000.edsh`, `shard-00001.edsh`, ... under `dir`.
pub fn write_shards<I>(seqs: I, dir: impl AsRef<Path>, cfg: &ShardWriteConfig) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = Result<PackedSequence>>,
{
    let mut writer = ShardWriter::new(dir, cfg)?;
    for seq in seqs {
        writer.push(&seq?)?;
    }
    writer.finish()
}
