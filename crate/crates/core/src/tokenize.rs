//! Tokenizer contract, the built-in byte tokenizer, and the order-stable
//! parallel tokenization driver.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::par::OrderedMap;

pub type TokenId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerSpec {
    pub name: String,
    pub vocab_size: u32,
    pub doc_sep: TokenId,
    pub bos: TokenId,
    pub reserved: TokenId,
    /// First id used for ordinary tokens; every special id sits below it.
    pub byte_offset: u32,
}

impl Default for TokenizerSpec {
    fn default() -> Self {
        Self {
            name: "byte".into(),
            vocab_size: 259,
            doc_sep: 0,
            bos: 1,
            reserved: 2,
            byte_offset: 3,
        }
    }
}

impl TokenizerSpec {
    pub fn validate(&self) -> Result<()> {
        let specials = [self.doc_sep, self.bos, self.reserved];
        for (i, a) in specials.iter().enumerate() {
            if *a >= self.byte_offset {
                return Err(Error::Config(format!("special id {a} must be below byte_offset {}", self.byte_offset)));
            }
            if specials[i + 1..].contains(a) {
                return Err(Error::Config(format!("special id {a} is used twice")));
            }
        }
        if self.vocab_size <= self.byte_offset {
            return Err(Error::Config("vocab_size must exceed byte_offset".into()));
        }
        Ok(())
    }

    fn is_special(&self, id: TokenId) -> bool {
        id == self.doc_sep || id == self.bos || id == self.reserved
    }
}

/// Anything that turns text into token ids. Implementations must be pure per
/// call; the driver invokes them from several threads at once.
pub trait Encoder: Sync {
    fn spec(&self) -> &TokenizerSpec;
    fn encode(&self, text: &str) -> std::result::Result<Vec<TokenId>, String>;
}

/// One token per UTF-8 byte, shifted past the special-id block.
#[derive(Debug, Clone)]
pub struct ByteTokenizer {
    spec: TokenizerSpec,
}

impl ByteTokenizer {
    pub fn new(spec: TokenizerSpec) -> Result<Self> {
        spec.validate()?;
        if (spec.vocab_size as u64) < spec.byte_offset as u64 + 256 {
            return Err(Error::Config(format!(
                "byte tokenizer needs vocab_size >= byte_offset + 256 = {}",
                spec.byte_offset as u64 + 256
            )));
        }
        Ok(Self { spec })
    }

    pub fn encode_bytes(&self, text: &str) -> Vec<TokenId> {
        let offset = self.spec.byte_offset;
        text.bytes().map(|b| b as TokenId + offset).collect()
    }

    pub fn decode(&self, tokens: &[TokenId]) -> Result<String> {
        let offset = self.spec.byte_offset;
        let bytes = tokens
            .iter()
            .map(|&t| {
                t.checked_sub(offset)
                    .filter(|b| *b < 256)
                    .map(|b| b as u8)
                    .ok_or_else(|| Error::Invalid(format!("token {t} is not a byte token")))
            })
            .collect::<Result<Vec<u8>>>()?;
        String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
    }
}

impl Default for ByteTokenizer {
    fn default() -> Self {
        Self::new(TokenizerSpec::default()).expect("default spec is valid")
    }
}

impl Encoder for ByteTokenizer {
    fn spec(&self) -> &TokenizerSpec {
        &self.spec
    }

    fn encode(&self, text: &str) -> std::result::Result<Vec<TokenId>, String> {
        Ok(self.encode_bytes(text))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub id: String,
    pub tokens: Vec<TokenId>,
}

impl AsRef<[TokenId]> for TokenizedDoc {
    fn as_ref(&self) -> &[TokenId] {
        &self.tokens
    }
}

fn encode_doc<E: Encoder + ?Sized>(encoder: &E, doc: Document) -> Result<TokenizedDoc> {
    let spec = encoder.spec();
    let tokens = encoder.encode(&doc.text).map_err(|message| Error::Encode {
        id: doc.id.clone(),
        message,
    })?;
    if let Some(bad) = tokens.iter().find(|&&t| t >= spec.vocab_size || spec.is_special(t)) {
        return Err(Error::Encode {
            id: doc.id,
            message: format!("emitted invalid token id {bad}"),
        });
    }
    Ok(TokenizedDoc { id: doc.id, tokens })
}

/// Tokenizes on `workers` threads. Output order is input order and the
/// output is identical for every worker count.
pub fn tokenize_parallel<'e, I, E>(
    docs: I,
    encoder: &'e E,
    workers: usize,
) -> Result<impl Iterator<Item = Result<TokenizedDoc>> + 'e>
where
    I: IntoIterator<Item = Result<Document>>,
    I::IntoIter: 'e,
    E: Encoder + ?Sized,
{
    OrderedMap::new(docs.into_iter(), workers, move |doc| encode_doc(encoder, doc))
}

/// Writes the intermediate token file: per document, a little-endian u64
/// count followed by that many little-endian u32 ids.
pub fn write_token_file<I>(docs: I, path: impl AsRef<Path>) -> Result<u64>
where
    I: IntoIterator<Item = Result<Vec<TokenId>>>,
{
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut n = 0;
    for tokens in docs {
        let tokens = tokens?;
        let io = |e| Error::io(path, e);
        out.write_all(&(tokens.len() as u64).to_le_bytes()).map_err(io)?;
        for t in &tokens {
            out.write_all(&t.to_le_bytes()).map_err(io)?;
        }
        n += 1;
    }
    out.flush().map_err(|e| Error::io(path, e))?;
    Ok(n)
}

pub struct TokenFileReader<R> {
    reader: R,
    path: std::path::PathBuf,
    done: bool,
}

pub fn read_token_file(path: impl AsRef<Path>) -> Result<TokenFileReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(TokenFileReader {
        reader: BufReader::new(file),
        path: path.to_path_buf(),
        done: false,
    })
}

impl<R: Read> TokenFileReader<R> {
    fn read_doc(&mut self) -> Result<Option<Vec<TokenId>>> {
        let mut count = [0u8; 8];
        match self.reader.read_exact(&mut count) {
            Ok(()) => {}
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(Error::io(&self.path, e)),
        }
        let count = u64::from_le_bytes(count) as usize;
        let mut bytes = vec![0u8; count.checked_mul(4).ok_or_else(|| Error::format(&self.path, "count overflow"))?];
        self.reader.read_exact(&mut bytes).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => Error::format(&self.path, "truncated token record"),
            _ => Error::io(&self.path, e),
        })?;
        Ok(Some(
            bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        ))
    }
}

impl<R: Read> Iterator for TokenFileReader<R> {
    type Item = Result<Vec<TokenId>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_doc() {
            Ok(Some(t)) => Some(Ok(t)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
