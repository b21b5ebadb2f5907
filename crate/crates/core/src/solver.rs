//! Ciphertext-only beam search over partial substitution keys.
//!
//! Cipher symbols are fixed one at a time, most frequent first. Every
//! hypothesis in the beam is extended with each plaintext letter it has not
//! used yet, and the `beam_width` best extensions survive.
//!
//! A hypothesis is scored on the positions it can already decode: each
//! decoded position contributes `ln P(letter | context)`, where the context
//! is the run of decoded positions immediately before it (at most
//! `order - 1` long). Undecoded positions contribute nothing. The ciphertext
//! is padded with a virtual space on both sides, so the first letter is
//! scored as a word start and the final space rewards ending on a complete
//! word. An optional frequency-matching term subtracts
//! `freq_match_weight * |ln(cipher freq / letter freq)|` per mapped symbol.
//!
//! With `space_is_symbol` set, the space is one more plaintext target and
//! every cipher glyph, spaces included, is a symbol to decode. This is the
//! setting for ciphers that encipher the word separator.
//!
//! Extending a hypothesis only changes the scores of the positions where the
//! new symbol occurs and the `order - 1` positions after each occurrence, so
//! children are scored incrementally from their parent.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::SPACE;
use crate::freqcode::RankTable;
use crate::lm::{CharNGramLM, SymbolId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("ciphertext has no symbols to decipher")]
    EmptyCipher,
    #[error("{symbols} distinct cipher symbols but only {letters} plaintext symbols")]
    TooManySymbols { symbols: usize, letters: usize },
    #[error("beam width must be at least 1")]
    ZeroBeam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub beam_width: usize,
    /// Use at most this many symbols of n-gram history (plus one); `None`
    /// uses the full model order.
    pub lm_order: Option<usize>,
    pub freq_match_weight: f64,
    /// The space is enciphered like a letter: any cipher symbol, including
    /// a literal space, may decode to the space.
    pub space_is_symbol: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { beam_width: 1000, lm_order: None, freq_match_weight: 0.0, space_is_symbol: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub plaintext: String,
    /// (cipher symbol, plaintext letter), in extension order.
    pub key: Vec<(char, char)>,
    /// `lm_log_prob - freq_match_weight * freq_penalty`.
    pub score: f64,
    pub lm_log_prob: f64,
    pub freq_penalty: f64,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Known(SymbolId),
    /// Index of the cipher symbol in extension order.
    Cipher(usize),
}

const UNSET: u8 = u8::MAX;

#[derive(Debug, Clone)]
struct Hypothesis {
    assign: Vec<u8>,
    used: [u64; 4],
    lm: f64,
    penalty: f64,
}

impl Hypothesis {
    fn uses(&self, letter: u8) -> bool {
        self.used[letter as usize / 64] >> (letter % 64) & 1 == 1
    }

    fn mark(&mut self, letter: u8) {
        self.used[letter as usize / 64] |= 1 << (letter % 64);
    }
}

struct Problem<'a> {
    lm: &'a CharNGramLM,
    history: usize,
    slots: Vec<Slot>,
    symbols: Vec<char>,
    /// Positions to rescore when each symbol gets fixed.
    affected: Vec<Vec<usize>>,
    /// ln(relative frequency) of each cipher symbol.
    cipher_ln_freq: Vec<f64>,
    letter_ln_freq: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(ciphertext: &[char], lm: &'a CharNGramLM, config: &SolverConfig) -> Result<Self, SolveError> {
        let table = RankTable::build(ciphertext, |&c| c == SPACE && !config.space_is_symbol);
        if table.is_empty() {
            return Err(SolveError::EmptyCipher);
        }
        let targets = target_count(lm, config);
        if table.len() > targets {
            return Err(SolveError::TooManySymbols { symbols: table.len(), letters: targets });
        }
        let order = config.lm_order.map_or(lm.order(), |o| o.clamp(1, lm.order()));
        let history = order - 1;

        let space = lm.space_id();
        let mut slots = Vec::with_capacity(ciphertext.len() + 2);
        slots.push(Slot::Known(space));
        for c in ciphertext {
            slots.push(match table.rank_of(c) {
                Some(r) => Slot::Cipher(r as usize),
                None => Slot::Known(space),
            });
        }
        slots.push(Slot::Known(space));

        let mut affected: Vec<Vec<usize>> = vec![Vec::new(); table.len()];
        for (p, slot) in slots.iter().enumerate() {
            if let Slot::Cipher(s) = *slot {
                // Positions arrive in increasing order, so only the tail
                // can repeat.
                let from = affected[s].last().map_or(p, |&last| p.max(last + 1));
                affected[s].extend(from..=(p + history).min(slots.len() - 1));
            }
        }

        let total: usize = (0..table.len() as u32).filter_map(|r| table.count(r)).sum();
        let cipher_ln_freq = (0..table.len() as u32)
            .map(|r| libm::log(table.count(r).unwrap_or(0) as f64 / total as f64))
            .collect();
        let letter_ln_freq = if config.space_is_symbol {
            // Unigram probabilities of the letters and the space, renormalized.
            let lp: Vec<f64> = (0..targets as SymbolId).map(|id| lm.log_prob_ids(&[], id)).collect();
            let norm = libm::log(lp.iter().map(|&x| libm::exp(x)).sum::<f64>());
            lp.into_iter().map(|x| x - norm).collect()
        } else {
            lm.letter_frequencies().into_iter().map(libm::log).collect()
        };

        Ok(Self { lm, history, slots, symbols: table.symbols().to_vec(), affected, cipher_ln_freq, letter_ln_freq })
    }

    #[inline]
    fn decode(&self, q: usize, assign: &[u8]) -> Option<SymbolId> {
        match self.slots[q] {
            Slot::Known(id) => Some(id),
            Slot::Cipher(s) => (assign[s] != UNSET).then_some(assign[s]),
        }
    }

    /// Log-probability contributed by position `q` (0 if it is undecoded or
    /// is the leading pad).
    #[inline]
    fn contribution(&self, q: usize, assign: &[u8]) -> f64 {
        if q == 0 {
            return 0.0;
        }
        let Some(sym) = self.decode(q, assign) else { return 0.0 };
        let mut ctx = [0u8; 8];
        let mut len = 0;
        let lo = q.saturating_sub(self.history);
        let mut i = q;
        while i > lo {
            i -= 1;
            match self.decode(i, assign) {
                Some(c) => {
                    len += 1;
                    ctx[8 - len] = c;
                }
                None => break,
            }
        }
        self.lm.log_prob_ids(&ctx[8 - len..], sym)
    }

    fn initial(&self) -> Hypothesis {
        let assign = vec![UNSET; self.symbols.len()];
        let lm = (0..self.slots.len()).map(|q| self.contribution(q, &assign)).sum();
        Hypothesis { assign, used: [0; 4], lm, penalty: 0.0 }
    }
}

/// Number of plaintext symbols a cipher symbol may decode to.
fn target_count(lm: &CharNGramLM, config: &SolverConfig) -> usize {
    lm.alphabet().len() + usize::from(config.space_is_symbol)
}

/// Total order on candidates: higher score first, then lexicographically
/// smaller key.
fn rank(a: (f64, &[u8], u8), b: (f64, &[u8], u8)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)).then(a.2.cmp(&b.2))
}

/// Decipher `ciphertext` with beam search. Plain spaces pass through
/// unless `config.space_is_symbol` is set.
pub fn solve(ciphertext: &[char], lm: &CharNGramLM, config: &SolverConfig) -> Result<Solution, SolveError> {
    if config.beam_width == 0 {
        return Err(SolveError::ZeroBeam);
    }
    let problem = Problem::new(ciphertext, lm, config)?;
    let letters = target_count(lm, config) as u8;
    let weight = config.freq_match_weight;

    let mut beam = vec![problem.initial()];
    let mut scratch = Vec::new();
    for step in 0..problem.symbols.len() {
        let affected = &problem.affected[step];
        // (score, parent, letter, lm, penalty)
        let mut candidates: Vec<(f64, u32, u8, f64, f64)> = Vec::with_capacity(beam.len() * letters as usize);
        for (pi, parent) in beam.iter().enumerate() {
            let old: f64 = affected.iter().map(|&q| problem.contribution(q, &parent.assign)).sum();
            scratch.clone_from(&parent.assign);
            for letter in (0..letters).filter(|&l| !parent.uses(l)) {
                scratch[step] = letter;
                let new: f64 = affected.iter().map(|&q| problem.contribution(q, &scratch)).sum();
                let lm_score = parent.lm + new - old;
                let penalty = parent.penalty
                    + libm::fabs(problem.cipher_ln_freq[step] - problem.letter_ln_freq[letter as usize]);
                candidates.push((lm_score - weight * penalty, pi as u32, letter, lm_score, penalty));
            }
        }

        let cmp = |a: &(f64, u32, u8, f64, f64), b: &(f64, u32, u8, f64, f64)| {
            rank(
                (a.0, &beam[a.1 as usize].assign[..step], a.2),
                (b.0, &beam[b.1 as usize].assign[..step], b.2),
            )
        };
        if candidates.len() > config.beam_width {
            candidates.select_nth_unstable_by(config.beam_width - 1, cmp);
            candidates.truncate(config.beam_width);
        }
        candidates.sort_unstable_by(cmp);

        beam = candidates
            .into_iter()
            .map(|(_, pi, letter, lm_score, penalty)| {
                let mut h = beam[pi as usize].clone();
                h.assign[step] = letter;
                h.mark(letter);
                h.lm = lm_score;
                h.penalty = penalty;
                h
            })
            .collect();
    }

    let best = &beam[0];
    let letters_of = lm.alphabet().letters();
    let symbol = |id: u8| letters_of.get(id as usize).copied().unwrap_or(SPACE);
    let plaintext = problem.slots[1..problem.slots.len() - 1]
        .iter()
        .map(|slot| match *slot {
            Slot::Known(_) => SPACE,
            Slot::Cipher(s) => symbol(best.assign[s]),
        })
        .collect();
    let key = problem.symbols.iter().zip(&best.assign).map(|(&c, &l)| (c, symbol(l))).collect();
    Ok(Solution {
        plaintext,
        key,
        score: best.lm - weight * best.penalty,
        lm_log_prob: best.lm,
        freq_penalty: best.penalty,
    })
}
