use std::fs::File;
use std::io::{BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use flate2::read::DeflateDecoder;

use super::format::{Codec, ShardHeader, TokenWidth};
use crate::error::{Error, Result};
use crate::tokenize::TokenId;

/// Random-access reader over one shard. Only the header is read on open;
/// frames are fetched by seeking to their byte range.
pub struct ShardReader<R> {
    src: R,
    path: PathBuf,
    header: ShardHeader,
    file_len: u64,
}

impl ShardReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), path)
    }
}

impl<R: Read + Seek> ShardReader<R> {
    pub fn from_reader(mut src: R, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let file_len = src.seek(SeekFrom::End(0)).map_err(|e| Error::io(&path, e))?;
        src.seek(SeekFrom::Start(0)).map_err(|e| Error::io(&path, e))?;
        let header = ShardHeader::decode(&mut src, file_len, &path)?;
        Ok(Self {
            src,
            path,
            header,
            file_len,
        })
    }

    pub fn header(&self) -> &ShardHeader {
        &self.header
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Byte range `[start, end)` of frame `i` within the file.
    pub fn frame_range(&self, i: u64) -> (u64, u64) {
        let offsets = &self.header.frame_offsets;
        let start = offsets[i as usize];
        let end = offsets.get(i as usize + 1).copied().unwrap_or(self.file_len);
        (start, end)
    }

    /// Decodes frame `i` into its sequences.
    pub fn read_frame(&mut self, i: u64) -> Result<Vec<Vec<TokenId>>> {
        if i >= self.header.frame_count() {
            return Err(Error::Invalid(format!("frame {i} out of range")));
        }
        let (start, end) = self.frame_range(i);
        let raw_len = self.header.frame_raw_len(i) as usize;
        let path = &self.path;
        self.src
            .seek(SeekFrom::Start(start))
            .map_err(|e| Error::io(path, e))?;
        let mut stored = vec![0u8; (end - start) as usize];
        self.src
            .read_exact(&mut stored)
            .map_err(|e| Error::io(path, e))?;

        let raw = match self.header.codec {
            Codec::None => stored,
            Codec::Deflate => {
                let mut raw = Vec::with_capacity(raw_len);
                // one extra byte of headroom exposes frames that inflate too large
                DeflateDecoder::new(&stored[..])
                    .take(raw_len as u64 + 1)
                    .read_to_end(&mut raw)
                    .map_err(|e| Error::format(path, format!("frame {i}: {e}")))?;
                raw
            }
        };
        if raw.len() != raw_len {
            return Err(Error::format(
                path,
                format!("frame {i} holds {} bytes, expected {raw_len}", raw.len()),
            ));
        }

        let seq_bytes = self.header.seq_len as usize * self.header.token_width.bytes() as usize;
        Ok(raw
            .chunks_exact(seq_bytes)
            .map(|seq| match self.header.token_width {
                TokenWidth::Two => seq
                    .chunks_exact(2)
                    .map(|c| u16::from_le_bytes([c[0], c[1]]) as TokenId)
                    .collect(),
                TokenWidth::Four => seq
                    .chunks_exact(4)
                    .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                    .collect(),
            })
            .collect())
    }
}
