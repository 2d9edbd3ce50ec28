//! On-disk layout of an `.edsh` shard. All integers are little-endian.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "EDSH"
//!      4     2  version (1)
//!      6     2  flags (bit 0: frames compressed)
//!      8     4  seq_len
//!     12     1  token_width (2 or 4)
//!     13     1  codec (0 none, 1 raw DEFLATE)
//!     14     4  frame_size, sequences per frame
//!     18     8  num_sequences
//!     26     8  frame_count
//!     34   8*n  absolute byte offset of each frame
//! ```
//!
//! Frame `i` spans from its offset to the next frame's offset, or to the end
//! of the file for the last frame.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"EDSH";
pub const VERSION: u16 = 1;
pub const FIXED_HEADER_LEN: u64 = 34;
pub const FLAG_COMPRESSED: u16 = 1;
pub const EXTENSION: &str = "edsh";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codec {
    None,
    #[default]
    Deflate,
}

impl Codec {
    pub fn id(self) -> u8 {
        match self {
            Codec::None => 0,
            Codec::Deflate => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Codec::None),
            1 => Some(Codec::Deflate),
            _ => None,
        }
    }
}

/// Bytes per stored token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TokenWidth {
    Two,
    #[default]
    Four,
}

impl TokenWidth {
    pub fn bytes(self) -> u8 {
        match self {
            TokenWidth::Two => 2,
            TokenWidth::Four => 4,
        }
    }

    pub fn max_token(self) -> u32 {
        match self {
            TokenWidth::Two => u16::MAX as u32,
            TokenWidth::Four => u32::MAX,
        }
    }
}

impl TryFrom<u8> for TokenWidth {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(TokenWidth::Two),
            4 => Ok(TokenWidth::Four),
            _ => Err(format!("token width must be 2 or 4, got {v}")),
        }
    }
}

impl From<TokenWidth> for u8 {
    fn from(w: TokenWidth) -> u8 {
        w.bytes()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardHeader {
    pub seq_len: u32,
    pub token_width: TokenWidth,
    pub codec: Codec,
    pub frame_size: u32,
    pub num_sequences: u64,
    pub frame_offsets: Vec<u64>,
}

impl ShardHeader {
    pub fn frame_count(&self) -> u64 {
        self.frame_offsets.len() as u64
    }

    pub fn encoded_len(&self) -> u64 {
        FIXED_HEADER_LEN + 8 * self.frame_count()
    }

    pub fn flags(&self) -> u16 {
        if self.codec == Codec::None {
            0
        } else {
            FLAG_COMPRESSED
        }
    }

    /// Sequences stored in frame `i`; only the last frame may be short.
    pub fn frame_sequences(&self, i: u64) -> u64 {
        let f = self.frame_size as u64;
        f.min(self.num_sequences - i * f)
    }

    /// Decompressed size of frame `i`.
    pub fn frame_raw_len(&self, i: u64) -> u64 {
        self.frame_sequences(i) * self.seq_len as u64 * self.token_width.bytes() as u64
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len() as usize);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.flags().to_le_bytes());
        out.extend_from_slice(&self.seq_len.to_le_bytes());
        out.push(self.token_width.bytes());
        out.push(self.codec.id());
        out.extend_from_slice(&self.frame_size.to_le_bytes());
        out.extend_from_slice(&self.num_sequences.to_le_bytes());
        out.extend_from_slice(&self.frame_count().to_le_bytes());
        for off in &self.frame_offsets {
            out.extend_from_slice(&off.to_le_bytes());
        }
        out
    }

    /// Reads and validates a header against the total file length.
    pub fn decode<R: Read>(src: &mut R, file_len: u64, path: &Path) -> Result<Self> {
        let bad = |m: String| Error::format(path, m);
        let io = |e: std::io::Error| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::format(path, "truncated header"),
            _ => Error::io(path, e),
        };

        let mut fixed = [0u8; FIXED_HEADER_LEN as usize];
        src.read_exact(&mut fixed).map_err(io)?;
        let u16_at = |o: usize| u16::from_le_bytes([fixed[o], fixed[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(fixed[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(fixed[o..o + 8].try_into().unwrap());

        if fixed[..4] != MAGIC {
            return Err(bad(format!("bad magic {:?}", &fixed[..4])));
        }
        let version = u16_at(4);
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let flags = u16_at(6);
        let seq_len = u32_at(8);
        let token_width = TokenWidth::try_from(fixed[12]).map_err(bad)?;
        let codec = Codec::from_id(fixed[13]).ok_or_else(|| bad(format!("unknown codec {}", fixed[13])))?;
        let frame_size = u32_at(14);
        let num_sequences = u64_at(18);
        let frame_count = u64_at(26);

        if flags & !FLAG_COMPRESSED != 0 || (flags & FLAG_COMPRESSED != 0) != (codec != Codec::None) {
            return Err(bad(format!("flags {flags:#x} disagree with codec {codec:?}")));
        }
        if num_sequences > 0 && (frame_size == 0 || seq_len == 0) {
            return Err(bad("zero frame_size or seq_len with sequences present".into()));
        }
        let expected_frames = if num_sequences == 0 {
            0
        } else {
            num_sequences.div_ceil(frame_size as u64)
        };
        if frame_count != expected_frames {
            return Err(bad(format!(
                "frame_count {frame_count} but {num_sequences} sequences at {frame_size} per frame need {expected_frames}"
            )));
        }
        if frame_count > file_len.saturating_sub(FIXED_HEADER_LEN) / 8 {
            return Err(bad("offset table runs past end of file".into()));
        }

        let mut table = vec![0u8; 8 * frame_count as usize];
        src.read_exact(&mut table).map_err(io)?;
        let frame_offsets: Vec<u64> = table
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();

        let header = ShardHeader {
            seq_len,
            token_width,
            codec,
            frame_size,
            num_sequences,
            frame_offsets,
        };
        let mut prev = header.encoded_len();
        for (i, &off) in header.frame_offsets.iter().enumerate() {
            let ok = if i == 0 { off == prev } else { off > prev };
            if !ok {
                return Err(bad(format!("frame offset {i} ({off}) out of order")));
            }
            prev = off;
        }
        if header.frame_count() > 0 && prev >= file_len {
            return Err(bad("last frame starts at or past end of file".into()));
        }
        if header.frame_count() == 0 && file_len != header.encoded_len() {
            return Err(bad("trailing bytes after empty shard header".into()));
        }
        Ok(header)
    }
}
