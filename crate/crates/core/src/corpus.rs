//! Corpus normalization and word-aligned chunking.
//!
//! Normalization lowercases, folds accents (except for English), keeps only
//! alphabet letters, and turns whitespace and dashes into single spaces.
//! Every other symbol is deleted in place, so `don't` becomes `dont`.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::{decompose_canonical, is_combining_mark};

use crate::alphabet::{Alphabet, LanguageId, SPACE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("empty corpus: nothing left after preprocessing")]
    EmptyCorpus,
    #[error("chunk length must be at least 1")]
    ZeroLength,
    #[error("text is not preprocessed (leading/trailing or doubled space)")]
    NotPreprocessed,
    #[error("insufficient text: {requested} chunks requested, only {produced} available")]
    InsufficientText { requested: usize, produced: usize },
}

/// A word-aligned slice of a preprocessed corpus, ready for encipherment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaintextChunk {
    pub text: String,
    pub language: LanguageId,
    /// Character index of the chunk's first character in the preprocessed corpus.
    pub source_offset: usize,
}

impl PlaintextChunk {
    pub fn new(text: impl Into<String>, language: LanguageId, source_offset: usize) -> Self {
        Self { text: text.into(), language, source_offset }
    }

    /// Length in characters.
    pub fn len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn chars(&self) -> Vec<char> {
        self.text.chars().collect()
    }
}

fn emit(c: char, out: &mut String, pending_space: &mut bool) {
    if *pending_space && !out.is_empty() {
        out.push(SPACE);
    }
    *pending_space = false;
    out.push(c);
}

fn is_dash(c: char) -> bool {
    matches!(
        c,
        '-' | '\u{2010}'..='\u{2015}' | '\u{2212}' | '\u{2E3A}' | '\u{2E3B}' | '\u{FE58}' | '\u{FE63}' | '\u{FF0D}'
    )
}

/// Normalize raw text into the alphabet of `alphabet`.
///
/// Whitespace and dash punctuation separate words; runs of separators
/// collapse to one space and the result never starts or ends with a space.
pub fn preprocess(raw: &str, alphabet: &Alphabet) -> Result<String, CorpusError> {
    let fold_accents = alphabet.language().strips_accents();
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;


    for raw_char in raw.chars() {
        if raw_char.is_whitespace() || is_dash(raw_char) {
            pending_space = true;
            continue;
        }
        for c in raw_char.to_lowercase() {
            if alphabet.contains(c) {
                emit(c, &mut out, &mut pending_space);
            } else if fold_accents {
                // Keep the base letters of the canonical decomposition and
                // drop the combining marks.
                decompose_canonical(c, |d| {
                    if !is_combining_mark(d) && alphabet.contains(d) {
                        emit(d, &mut out, &mut pending_space);
                    }
                });
            }
        }
    }

    if out.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(out)
}

/// One step of the chunker: either a chunk or a window that had to be
/// skipped because its first word is longer than the chunk length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChunkEvent {
    Chunk(PlaintextChunk),
    Skipped(SkippedWindow),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedWindow {
    pub offset: usize,
    pub word_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chunking {
    pub chunks: Vec<PlaintextChunk>,
    pub warnings: Vec<SkippedWindow>,
}

/// Iterator over successive, non-overlapping windows of a preprocessed text.
///
/// Each window starts at a word boundary and covers at most `max_len`
/// characters; a trailing partial word is trimmed and becomes the start of
/// the next window.
#[derive(Debug, Clone)]
pub struct Chunker {
    chars: Vec<char>,
    max_len: usize,
    offset: usize,
    language: LanguageId,
}

impl Chunker {
    pub fn new(text: &str, max_len: usize, language: LanguageId) -> Result<Self, CorpusError> {
        if max_len == 0 {
            return Err(CorpusError::ZeroLength);
        }
        if text.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        if text.starts_with(SPACE) || text.ends_with(SPACE) || text.contains("  ") {
            return Err(CorpusError::NotPreprocessed);
        }
        Ok(Self { chars: text.chars().collect(), max_len, offset: 0, language })
    }

    /// Character offset where the next window starts.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn set_max_len(&mut self, max_len: usize) -> Result<(), CorpusError> {
        if max_len == 0 {
            return Err(CorpusError::ZeroLength);
        }
        self.max_len = max_len;
        Ok(())
    }

    /// Restart at `offset`, which must be 0 or just after a space.
    pub fn seek(&mut self, offset: usize) {
        debug_assert!(offset == 0 || self.chars.get(offset - 1) == Some(&SPACE));
        self.offset = offset.min(self.chars.len());
    }

    pub fn text_len(&self) -> usize {
        self.chars.len()
    }

    fn next_space_from(&self, from: usize) -> Option<usize> {
        self.chars[from..].iter().position(|&c| c == SPACE).map(|i| i + from)
    }

    fn make_chunk(&self, start: usize, end: usize) -> ChunkEvent {
        ChunkEvent::Chunk(PlaintextChunk {
            text: self.chars[start..end].iter().collect(),
            language: self.language.clone(),
            source_offset: start,
        })
    }
}

impl Iterator for Chunker {
    type Item = ChunkEvent;

    fn next(&mut self) -> Option<ChunkEvent> {
        let len = self.chars.len();
        let start = self.offset;
        if start >= len {
            return None;
        }
        let end = start + self.max_len;
        if end >= len {
            self.offset = len;
            return Some(self.make_chunk(start, len));
        }
        if self.chars[end] == SPACE {
            self.offset = end + 1;
            return Some(self.make_chunk(start, end));
        }
        match self.chars[start..end].iter().rposition(|&c| c == SPACE) {
            Some(rel) => {
                let cut = start + rel;
                self.offset = cut + 1;
                Some(self.make_chunk(start, cut))
            }
            None => {
                let word_end = self.next_space_from(start).unwrap_or(len);
                self.offset = (word_end + 1).min(len);
                Some(ChunkEvent::Skipped(SkippedWindow { offset: start, word_len: word_end - start }))
            }
        }
    }
}

/// Cut `count` word-aligned chunks of at most `max_len` characters from a
/// preprocessed text, in corpus order.
pub fn chunk(
    text: &str,
    max_len: usize,
    count: usize,
    language: LanguageId,
) -> Result<Chunking, CorpusError> {
    let mut out = Chunking::default();
    for event in Chunker::new(text, max_len, language)? {
        if out.chunks.len() == count {
            break;
        }
        match event {
            ChunkEvent::Chunk(c) => out.chunks.push(c),
            ChunkEvent::Skipped(w) => out.warnings.push(w),
        }
    }
    if out.chunks.len() < count {
        return Err(CorpusError::InsufficientText { requested: count, produced: out.chunks.len() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn en() -> Alphabet {
        Alphabet::english()
    }

    #[test]
    fn preprocess_basic_english() {
        assert_eq!(preprocess("Hello, World!", &en()).unwrap(), "hello world");
        assert_eq!(preprocess("  don't\tstop \n\n now ", &en()).unwrap(), "dont stop now");
        assert_eq!(preprocess("", &en()), Err(CorpusError::EmptyCorpus));
        assert_eq!(preprocess("1234 !?", &en()), Err(CorpusError::EmptyCorpus));
    }

    #[test]
    fn english_keeps_accents_out_of_alphabet() {
        assert_eq!(preprocess("café au lait", &en()).unwrap(), "caf au lait");
    }

    #[test]
    fn sharp_s_is_dropped_even_when_folding() {
        let de = Alphabet::latin(LanguageId::German);
        assert_eq!(preprocess("Straße Über", &de).unwrap(), "strae uber");
    }

    #[test]
    fn custom_alphabet_keeps_its_own_accented_letters() {
        let alpha = Alphabet::new(vec!['a', 'b', 'é'], LanguageId::Custom("x".into())).unwrap();
        assert_eq!(preprocess("ÉBà", &alpha).unwrap(), "éba");
    }

    #[test]
    fn chunk_trims_partial_word() {
        let out = chunk("the cat sat on a mat", 8, 1, LanguageId::English).unwrap();
        assert_eq!(out.chunks[0].text, "the cat");
        assert_eq!(out.chunks[0].len(), 7);
        assert_eq!(out.chunks[0].source_offset, 0);
    }

    #[test]
    fn chunk_exact_word_end_keeps_full_window() {
        let out = chunk("the cat sat", 7, 2, LanguageId::English).unwrap();
        assert_eq!(out.chunks[0].text, "the cat");
        assert_eq!(out.chunks[1].text, "sat");
        assert_eq!(out.chunks[1].source_offset, 8);
    }

    #[test]
    fn long_window_is_whole_text() {
        let text = "the cat sat on a mat";
        let out = chunk(text, 100, 1, LanguageId::English).unwrap();
        assert_eq!(out.chunks.len(), 1);
        assert_eq!(out.chunks[0].text, text);
        let out = chunk(text, text.len(), 1, LanguageId::English).unwrap();
        assert_eq!(out.chunks[0].text, text);
    }

    #[test]
    fn too_short_window_is_skipped_with_warning() {
        let events: Vec<_> = Chunker::new("running fast", 2, LanguageId::English).unwrap().collect();
        assert_eq!(
            events,
            vec![
                ChunkEvent::Skipped(SkippedWindow { offset: 0, word_len: 7 }),
                ChunkEvent::Skipped(SkippedWindow { offset: 8, word_len: 4 }),
            ]
        );
        assert_eq!(
            chunk("running fast", 2, 1, LanguageId::English),
            Err(CorpusError::InsufficientText { requested: 1, produced: 0 })
        );
    }

    #[test]
    fn chunk_rejects_bad_input() {
        assert_eq!(chunk("abc", 0, 1, LanguageId::English), Err(CorpusError::ZeroLength));
        assert_eq!(chunk("", 3, 1, LanguageId::English), Err(CorpusError::EmptyCorpus));
        assert_eq!(chunk("a  b", 3, 1, LanguageId::English), Err(CorpusError::NotPreprocessed));
    }
}
