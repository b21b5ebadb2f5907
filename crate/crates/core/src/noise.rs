//! Transcription noise: random substitutions, insertions and deletions on the
//! ciphertext, recorded in a log that can be replayed or reverted.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::SPACE;
use crate::cipher::{CipherInstance, SpacingMode};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("noise rate {0} outside [0, 0.5]")]
    BadRate(f64),
    #[error("noise rate is positive but no edit kinds were given")]
    NoKinds,
    #[error("instance already carries noise")]
    AlreadyNoisy,
    #[error("{requested} substitutions/deletions requested on a ciphertext of length {len}")]
    TooManyEdits { requested: usize, len: usize },
    #[error("cannot substitute: the symbol inventory has no alternative to {0:?}")]
    NoAlternative(char),
    #[error("noise log does not match the text at position {0}")]
    LogMismatch(usize),
    #[error("unknown noise kind {0:?} (expected s, i or d)")]
    UnknownKind(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NoiseKind {
    #[serde(rename = "s")]
    Substitute,
    #[serde(rename = "i")]
    Insert,
    #[serde(rename = "d")]
    Delete,
}

impl NoiseKind {
    pub fn letter(self) -> char {
        match self {
            NoiseKind::Substitute => 's',
            NoiseKind::Insert => 'i',
            NoiseKind::Delete => 'd',
        }
    }

    pub fn from_letter(c: char) -> Result<Self, NoiseError> {
        match c {
            's' => Ok(NoiseKind::Substitute),
            'i' => Ok(NoiseKind::Insert),
            'd' => Ok(NoiseKind::Delete),
            other => Err(NoiseError::UnknownKind(other)),
        }
    }

    /// Parse a kind set such as `"sid"` or `"s"`; duplicates are ignored.
    pub fn parse_set(s: &str) -> Result<Vec<NoiseKind>, NoiseError> {
        let mut kinds = Vec::new();
        for c in s.chars().filter(|c| !c.is_whitespace() && *c != ',') {
            let k = NoiseKind::from_letter(c)?;
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
        kinds.sort_unstable();
        Ok(kinds)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for NoiseKind {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => NoiseKind::from_letter(c),
            _ => Err(NoiseError::UnknownKind(s.chars().next().unwrap_or(' '))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Fraction of the ciphertext length to corrupt.
    pub rate: f64,
    pub kinds: Vec<NoiseKind>,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self { rate: 0.0, kinds: Vec::new(), seed: 0 }
    }

    pub fn new(rate: f64, kinds: Vec<NoiseKind>, seed: u64) -> Result<Self, NoiseError> {
        let spec = Self { rate, kinds, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=0.5).contains(&self.rate) {
            return Err(NoiseError::BadRate(self.rate));
        }
        if self.rate > 0.0 && self.kinds.is_empty() {
            return Err(NoiseError::NoKinds);
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.rate == 0.0
    }

    /// Number of edits on a ciphertext of length `n`.
    pub fn edit_count(&self, n: usize) -> usize {
        libm::round(self.rate * n as f64) as usize
    }

    pub fn kinds_string(&self) -> String {
        self.kinds.iter().map(|k| k.letter()).collect()
    }
}

/// One edit. `position` indexes the clean ciphertext; an insertion at `p`
/// goes immediately before clean symbol `p` (`p == len` appends).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseEdit {
    pub kind: NoiseKind,
    pub position: usize,
    pub before: Option<char>,
    pub after: Option<char>,
}

impl NoiseEdit {
    fn order_key(&self) -> (usize, u8) {
        (self.position, if self.kind == NoiseKind::Insert { 0 } else { 1 })
    }
}

/// Edits in replay order: by position, insertions before the substitution or
/// deletion at the same position, insertions at one gap in emission order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseLog {
    pub edits: Vec<NoiseEdit>,
}

impl NoiseLog {
    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn count(&self, kind: NoiseKind) -> usize {
        self.edits.iter().filter(|e| e.kind == kind).count()
    }

    /// Replay the edits on the clean ciphertext.
    pub fn apply(&self, clean: &[char]) -> Result<Vec<char>, NoiseError> {
        let mut out = Vec::with_capacity(clean.len() + self.count(NoiseKind::Insert));
        let mut edits = self.edits.iter().peekable();
        for p in 0..=clean.len() {
            while let Some(e) = edits.next_if(|e| e.position == p && e.kind == NoiseKind::Insert) {
                out.push(e.after.ok_or(NoiseError::LogMismatch(p))?);
            }
            if p == clean.len() {
                break;
            }
            match edits.next_if(|e| e.position == p) {
                Some(e) => {
                    if e.before != Some(clean[p]) {
                        return Err(NoiseError::LogMismatch(p));
                    }
                    if e.kind == NoiseKind::Substitute {
                        out.push(e.after.ok_or(NoiseError::LogMismatch(p))?);
                    }
                }
                None => out.push(clean[p]),
            }
        }
        match edits.next() {
            Some(e) => Err(NoiseError::LogMismatch(e.position)),
            None => Ok(out),
        }
    }

    /// Undo the edits on a noisy ciphertext.
    pub fn revert(&self, noisy: &[char]) -> Result<Vec<char>, NoiseError> {
        let clean_len = (noisy.len() + self.count(NoiseKind::Delete))
            .checked_sub(self.count(NoiseKind::Insert))
            .ok_or(NoiseError::LogMismatch(0))?;
        let mut clean = Vec::with_capacity(clean_len);
        let mut q = 0;
        let take = |q: &mut usize, expect: Option<char>| -> Result<char, NoiseError> {
            let c = *noisy.get(*q).ok_or(NoiseError::LogMismatch(*q))?;
            if expect.is_some_and(|e| e != c) {
                return Err(NoiseError::LogMismatch(*q));
            }
            *q += 1;
            Ok(c)
        };
        let mut edits = self.edits.iter().peekable();
        for p in 0..=clean_len {
            while let Some(e) = edits.next_if(|e| e.position == p && e.kind == NoiseKind::Insert) {
                take(&mut q, e.after)?;
            }
            if p == clean_len {
                break;
            }
            match edits.next_if(|e| e.position == p) {
                Some(e) => {
                    if e.kind == NoiseKind::Substitute {
                        take(&mut q, e.after)?;
                    }
                    clean.push(e.before.ok_or(NoiseError::LogMismatch(p))?);
                }
                None => clean.push(take(&mut q, None)?),
            }
        }
        if q != noisy.len() || edits.next().is_some() {
            return Err(NoiseError::LogMismatch(q));
        }
        Ok(clean)
    }
}

/// Symbols noise may introduce: the key's image, plus the plain space when
/// spaces pass through unenciphered.
fn inventory(instance: &CipherInstance) -> Vec<char> {
    let mut symbols: Vec<char> = instance.key.cipher_symbols().collect();
    if instance.spacing_mode == SpacingMode::PlainSpace {
        symbols.push(SPACE);
    }
    symbols
}

/// Corrupt `round(rate * N)` ciphertext positions. Each edit's kind is drawn
/// uniformly from `spec.kinds`; substitutions and deletions hit distinct
/// positions; a substitution always changes the symbol. The plaintext is left
/// untouched.
pub fn inject_noise(instance: &CipherInstance, spec: &NoiseSpec) -> Result<CipherInstance, NoiseError> {
    spec.validate()?;
    if !instance.noise_log.is_empty() {
        return Err(NoiseError::AlreadyNoisy);
    }
    let clean = &instance.ciphertext;
    let n = clean.len();
    let count = spec.edit_count(n);
    if count == 0 {
        return Ok(instance.clone());
    }

    let mut rng = seed::rng(spec.seed);
    let kinds: Vec<NoiseKind> = (0..count).map(|_| spec.kinds[rng.random_range(0..spec.kinds.len())]).collect();
    let in_place = kinds.iter().filter(|&&k| k != NoiseKind::Insert).count();
    if in_place > n {
        return Err(NoiseError::TooManyEdits { requested: in_place, len: n });
    }
    let symbols = inventory(instance);
    let mut positions = rand::seq::index::sample(&mut rng, n, in_place).into_iter();

    let mut edits = Vec::with_capacity(count);
    for kind in kinds {
        let edit = match kind {
            NoiseKind::Insert => {
                let position = rng.random_range(0..=n);
                let after = symbols[rng.random_range(0..symbols.len())];
                NoiseEdit { kind, position, before: None, after: Some(after) }
            }
            NoiseKind::Delete => {
                let position = positions.next().expect("sampled one position per in-place edit");
                NoiseEdit { kind, position, before: Some(clean[position]), after: None }
            }
            NoiseKind::Substitute => {
                let position = positions.next().expect("sampled one position per in-place edit");
                let before = clean[position];
                if !symbols.iter().any(|&s| s != before) {
                    return Err(NoiseError::NoAlternative(before));
                }
                let after = loop {
                    let s = symbols[rng.random_range(0..symbols.len())];
                    if s != before {
                        break s;
                    }
                };
                NoiseEdit { kind, position, before: Some(before), after: Some(after) }
            }
        };
        edits.push(edit);
    }
    edits.sort_by_key(NoiseEdit::order_key);

    let log = NoiseLog { edits };
    let noisy = log.apply(clean)?;
    Ok(CipherInstance { ciphertext: noisy, noise_log: log, ..instance.clone() })
}
