//! Per-word anagramming of plain-space ciphertexts.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::alphabet::SPACE;
use crate::cipher::{CipherInstance, SpacingMode};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnagramError {
    #[error("anagramming needs a plain-space cipher, got {0}")]
    NotPlainSpace(SpacingMode),
    #[error("anagramming must happen before noise is injected")]
    Noisy,
    #[error("expected {expected} word permutations, got {got}")]
    WordCount { expected: usize, got: usize },
    #[error("permutation for word {0} is not a permutation of its positions")]
    BadPermutation(usize),
}

/// Spans `[start, end)` of the space-separated words of `text`.
pub fn word_spans<T: PartialEq>(text: &[T], separator: &T) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in text.iter().enumerate() {
        match (c == separator, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                spans.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, text.len()));
    }
    spans
}

/// Rearrange each word: position `i` of word `w` receives the symbol at
/// `perms[w][i]` of the original word. Spaces stay where they are.
pub fn apply_word_permutations(text: &[char], perms: &[Vec<usize>]) -> Result<Vec<char>, AnagramError> {
    let spans = word_spans(text, &SPACE);
    if spans.len() != perms.len() {
        return Err(AnagramError::WordCount { expected: spans.len(), got: perms.len() });
    }
    let mut out = text.to_vec();
    for (w, (&(start, end), perm)) in spans.iter().zip(perms).enumerate() {
        let len = end - start;
        let mut seen = alloc::vec![false; len];
        if perm.len() != len {
            return Err(AnagramError::BadPermutation(w));
        }
        for (i, &src) in perm.iter().enumerate() {
            if src >= len || core::mem::replace(&mut seen[src], true) {
                return Err(AnagramError::BadPermutation(w));
            }
            out[start + i] = text[start + src];
        }
    }
    Ok(out)
}

/// Shuffle the letters of every ciphertext word with an independent uniform
/// permutation and record the permutations.
pub fn anagram(instance: &CipherInstance, seed: u64) -> Result<CipherInstance, AnagramError> {
    if instance.spacing_mode != SpacingMode::PlainSpace {
        return Err(AnagramError::NotPlainSpace(instance.spacing_mode));
    }
    if !instance.noise_log.is_empty() {
        return Err(AnagramError::Noisy);
    }
    let mut rng = seed::rng(seed);
    let perms: Vec<Vec<usize>> = word_spans(&instance.ciphertext, &SPACE)
        .into_iter()
        .map(|(start, end)| {
            let mut perm: Vec<usize> = (0..end - start).collect();
            perm.shuffle(&mut rng);
            perm
        })
        .collect();
    with_permutations(instance, perms)
}

/// Anagram `instance` with given permutations (e.g. ones recorded earlier).
pub fn with_permutations(instance: &CipherInstance, perms: Vec<Vec<usize>>) -> Result<CipherInstance, AnagramError> {
    if instance.spacing_mode != SpacingMode::PlainSpace {
        return Err(AnagramError::NotPlainSpace(instance.spacing_mode));
    }
    let ciphertext = apply_word_permutations(&instance.ciphertext, &perms)?;
    Ok(CipherInstance { ciphertext, anagram_perms: Some(perms), ..instance.clone() })
}
