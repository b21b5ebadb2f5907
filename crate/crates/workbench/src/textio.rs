//! Plain-text, token-line and JSON-lines file formats.
//!
//! Any path ending in `.gz` is read and written through gzip.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use decipher_core::corpus::SkippedWindow;
use decipher_core::{LanguageId, PlaintextChunk, SEPARATOR_TOKEN, SPACE};
use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

pub fn open_read(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(if is_gz(path) {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

pub fn open_write(path: &Path) -> Result<Box<dyn Write>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(if is_gz(path) {
        Box::new(BufWriter::new(GzEncoder::new(file, Compression::default())))
    } else {
        Box::new(BufWriter::new(file))
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    open_read(path)?.read_to_string(&mut s).map_err(|e| Error::io(path, e))?;
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = open_write(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    open_read(path)?.lines().collect::<io::Result<_>>().map_err(|e| Error::io(path, e))
}

pub fn write_lines<S: AsRef<str>>(path: &Path, lines: impl IntoIterator<Item = S>) -> Result<()> {
    let mut w = open_write(path)?;
    let res: io::Result<()> = (|| {
        for line in lines {
            w.write_all(line.as_ref().as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e))?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let lines = items.iter().map(serde_json::to_string).collect::<serde_json::Result<Vec<_>>>()?;
    write_lines(path, lines)
}

/// One line of a chunk manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkRecord {
    pub language: LanguageId,
    pub offset: usize,
    pub length: usize,
    pub text: String,
}

impl From<&PlaintextChunk> for ChunkRecord {
    fn from(c: &PlaintextChunk) -> Self {
        Self { language: c.language.clone(), offset: c.source_offset, length: c.len(), text: c.text.clone() }
    }
}

impl From<ChunkRecord> for PlaintextChunk {
    fn from(r: ChunkRecord) -> Self {
        PlaintextChunk::new(r.text, r.language, r.offset)
    }
}

pub fn warn_skipped(windows: &[SkippedWindow]) {
    for w in windows {
        eprintln!("warning: skipped window at offset {}: word of {} characters exceeds the chunk length", w.offset, w.word_len);
    }
}

/// Render characters as interchange tokens: one token per character,
/// `_` for the space.
pub fn chars_to_tokens(chars: impl IntoIterator<Item = char>) -> String {
    let mut out = String::new();
    for (i, c) in chars.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if c == SPACE {
            out.push_str(SEPARATOR_TOKEN);
        } else {
            out.push(c);
        }
    }
    out
}

/// Inverse of [`chars_to_tokens`]. Multi-character tokens are an error.
pub fn tokens_to_chars(line: &str) -> Result<Vec<char>> {
    line.split_whitespace()
        .map(|tok| {
            if tok == SEPARATOR_TOKEN {
                return Ok(SPACE);
            }
            let mut it = tok.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Format(format!("token {tok:?} is not a single character"))),
            }
        })
        .collect()
}

/// Read a user transcription: whitespace-separated symbols, `_` marking a
/// word boundary. Symbols may be any single character.
pub fn load_user_cipher(path: &Path) -> Result<Vec<char>> {
    let symbols = tokens_to_chars(&read_text(path)?)?;
    if symbols.is_empty() {
        return Err(Error::EmptyInput(path.display().to_string()));
    }
    Ok(symbols)
}
