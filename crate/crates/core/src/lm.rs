//! Character n-gram language model with interpolated Witten-Bell smoothing.
//!
//! For a context `h` seen `C(h)` times with `T(h)` distinct followers,
//!
//! ```text
//! P(w | h) = (c(h w) + T(h) * P(w | h')) / (C(h) + T(h))
//! ```
//!
//! where `h'` drops the oldest symbol of `h`, and the recursion ends in the
//! uniform distribution over the vocabulary (letters, space and a boundary
//! symbol). The model is stored in backoff form: every seen n-gram keeps its
//! interpolated probability and every seen context keeps the weight
//! `T(h) / (C(h) + T(h))` that scales the lower-order estimate for followers
//! it has not seen. Lookups are exact, not an approximation of the
//! interpolated model.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::alphabet::{Alphabet, SPACE};

/// Index into the model vocabulary: letters first, then space, then boundary.
pub type SymbolId = u8;

/// Longest supported n-gram (one byte per symbol in a `u64` key).
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LmError {
    #[error("order must be between 1 and {MAX_ORDER}, got {0}")]
    BadOrder(usize),
    #[error("corpus has {len} symbols, fewer than the model order {order}")]
    CorpusTooSmall { len: usize, order: usize },
    #[error("symbol {0:?} is not in the model alphabet")]
    UnknownSymbol(char),
    #[error("malformed model entry: {0}")]
    BadEntry(&'static str),
}

fn mask(bytes: usize) -> u64 {
    match bytes {
        0 => 0,
        b if b >= 8 => u64::MAX,
        b => (1u64 << (8 * b)) - 1,
    }
}

fn pack(ids: &[SymbolId]) -> u64 {
    ids.iter().fold(0u64, |k, &id| (k << 8) | (id as u64 + 1))
}

fn unpack(mut key: u64) -> Vec<SymbolId> {
    let mut ids = Vec::new();
    while key != 0 {
        ids.push((key & 0xFF) as u8 - 1);
        key >>= 8;
    }
    ids.reverse();
    ids
}

fn symbol_ids(text: &str, alphabet: &Alphabet) -> Result<Vec<SymbolId>, LmError> {
    let space = alphabet.len() as SymbolId;
    text.chars()
        .map(|c| {
            if c == SPACE {
                Ok(space)
            } else {
                alphabet.index_of(c).map(|i| i as SymbolId).ok_or(LmError::UnknownSymbol(c))
            }
        })
        .collect()
}

/// Raw n-gram counts for orders 1 through `order`.
#[derive(Debug, Clone)]
pub struct NGramCounts {
    order: usize,
    alphabet: Alphabet,
    /// `by_order[k - 1]` maps packed k-grams to counts.
    by_order: Vec<HashMap<u64, u64>>,
}

impl NGramCounts {
    pub fn from_text(text: &str, alphabet: &Alphabet, order: usize) -> Result<Self, LmError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(LmError::BadOrder(order));
        }
        let ids = symbol_ids(text, alphabet)?;
        if ids.len() < order {
            return Err(LmError::CorpusTooSmall { len: ids.len(), order });
        }
        let mut by_order: Vec<HashMap<u64, u64>> = vec![HashMap::new(); order];
        let history_mask = mask(order - 1);
        let mut history = 0u64;
        let mut available = 0usize;
        for &id in &ids {
            let sym = id as u64 + 1;
            for k in 1..=order.min(available + 1) {
                let gram = ((history & mask(k - 1)) << 8) | sym;
                *by_order[k - 1].entry(gram).or_insert(0) += 1;
            }
            history = ((history << 8) | sym) & history_mask;
            available = (available + 1).min(order - 1);
        }
        Ok(Self { order, alphabet: alphabet.clone(), by_order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn ids(&self, symbols: &[char]) -> Option<Vec<SymbolId>> {
        symbol_ids(&symbols.iter().collect::<alloc::string::String>(), &self.alphabet).ok()
    }

    /// Occurrences of an n-gram given as characters (space = `' '`).
    pub fn count(&self, gram: &[char]) -> u64 {
        if gram.is_empty() || gram.len() > self.order {
            return 0;
        }
        self.ids(gram)
            .and_then(|ids| self.by_order[ids.len() - 1].get(&pack(&ids)).copied())
            .unwrap_or(0)
    }

    /// Unsmoothed maximum-likelihood `P(next | context)`; `None` when the
    /// context was never followed by anything.
    pub fn ml_prob(&self, context: &[char], next: char) -> Option<f64> {
        if context.len() >= self.order {
            return None;
        }
        let ctx = self.ids(context)?;
        let key = pack(&ctx);
        let grams = &self.by_order[ctx.len()];
        let total: u64 = grams.iter().filter(|(&g, _)| g >> 8 == key).map(|(_, &c)| c).sum();
        if total == 0 {
            return None;
        }
        let mut gram = context.to_vec();
        gram.push(next);
        Some(self.count(&gram) as f64 / total as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    log_prob: f64,
    log_backoff: f64,
}

/// One stored n-gram: the symbols, their interpolated log-probability and,
/// when the n-gram is itself a context, its log backoff weight.
#[derive(Debug, Clone, PartialEq)]
pub struct LmEntry {
    pub symbols: Vec<SymbolId>,
    pub log_prob: f64,
    pub log_backoff: f64,
}

/// A trained, read-only character n-gram model. Natural logarithms
/// throughout.
#[derive(Debug, Clone)]
pub struct CharNGramLM {
    order: usize,
    alphabet: Alphabet,
    table: HashMap<u64, Entry>,
    root_log_backoff: f64,
    letter_counts: Vec<u64>,
}

/// Count `corpus` and estimate an interpolated Witten-Bell model of `order`.
pub fn train_lm(corpus: &str, alphabet: &Alphabet, order: usize) -> Result<CharNGramLM, LmError> {
    Ok(CharNGramLM::estimate(&NGramCounts::from_text(corpus, alphabet, order)?))
}

impl CharNGramLM {
    pub fn estimate(counts: &NGramCounts) -> Self {
        let alphabet = counts.alphabet.clone();
        let vocab = (alphabet.len() + 2) as f64;
        let unigrams = &counts.by_order[0];
        let total: u64 = unigrams.values().sum();
        let types = unigrams.len() as f64;
        let denom = total as f64 + types;

        let mut table: HashMap<u64, Entry> = HashMap::with_capacity(counts.by_order.iter().map(|m| m.len()).sum());
        for (&g, &c) in unigrams {
            let p = (c as f64 + types / vocab) / denom;
            table.insert(g, Entry { log_prob: libm::log(p), log_backoff: 0.0 });
        }

        for k in 2..=counts.order {
            let grams = &counts.by_order[k - 1];
            // context -> (C(h), T(h))
            let mut contexts: HashMap<u64, (u64, u64)> = HashMap::new();
            for (&g, &c) in grams {
                let s = contexts.entry(g >> 8).or_insert((0, 0));
                s.0 += c;
                s.1 += 1;
            }
            let mut fresh = Vec::with_capacity(grams.len());
            for (&g, &c) in grams {
                let (ctx_total, ctx_types) = contexts[&(g >> 8)];
                let lower = table[&(g & mask(k - 1))].log_prob;
                let p = (c as f64 + ctx_types as f64 * libm::exp(lower)) / (ctx_total + ctx_types) as f64;
                fresh.push((g, libm::log(p)));
            }
            for (h, (ctx_total, ctx_types)) in contexts {
                let e = table.get_mut(&h).expect("every context is a seen shorter n-gram");
                e.log_backoff = libm::log(ctx_types as f64 / (ctx_total + ctx_types) as f64);
            }
            for (g, log_prob) in fresh {
                table.insert(g, Entry { log_prob, log_backoff: 0.0 });
            }
        }

        let mut letter_counts = vec![0u64; alphabet.len()];
        for (i, n) in letter_counts.iter_mut().enumerate() {
            *n = unigrams.get(&(i as u64 + 1)).copied().unwrap_or(0);
        }
        Self {
            order: counts.order,
            alphabet,
            table,
            root_log_backoff: libm::log(types / denom),
            letter_counts,
        }
    }

    /// Rebuild a model from stored parts (see [`CharNGramLM::entries`]).
    pub fn from_parts(
        order: usize,
        alphabet: Alphabet,
        root_log_backoff: f64,
        letter_counts: Vec<u64>,
        entries: impl IntoIterator<Item = LmEntry>,
    ) -> Result<Self, LmError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(LmError::BadOrder(order));
        }
        if letter_counts.len() != alphabet.len() {
            return Err(LmError::BadEntry("letter count table does not match the alphabet"));
        }
        let vocab = alphabet.len() + 2;
        let mut table = HashMap::new();
        for e in entries {
            if e.symbols.is_empty() || e.symbols.len() > order {
                return Err(LmError::BadEntry("n-gram length outside 1..=order"));
            }
            if e.symbols.iter().any(|&s| s as usize >= vocab) {
                return Err(LmError::BadEntry("symbol id outside the vocabulary"));
            }
            table.insert(pack(&e.symbols), Entry { log_prob: e.log_prob, log_backoff: e.log_backoff });
        }
        Ok(Self { order, alphabet, table, root_log_backoff, letter_counts })
    }

    /// All stored n-grams, shortest first, then by symbol ids.
    pub fn entries(&self) -> Vec<LmEntry> {
        // Packed keys of length k are all below 2^(8k), so numeric order is
        // length first.
        let mut keys: Vec<u64> = self.table.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| {
                let e = self.table[&k];
                LmEntry { symbols: unpack(k), log_prob: e.log_prob, log_backoff: e.log_backoff }
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vocab_size(&self) -> usize {
        self.alphabet.len() + 2
    }

    pub fn space_id(&self) -> SymbolId {
        self.alphabet.len() as SymbolId
    }

    pub fn boundary_id(&self) -> SymbolId {
        self.alphabet.len() as SymbolId + 1
    }

    pub fn root_log_backoff(&self) -> f64 {
        self.root_log_backoff
    }

    pub fn letter_counts(&self) -> &[u64] {
        &self.letter_counts
    }

    /// Add-one smoothed relative frequency of each letter (spaces excluded).
    pub fn letter_frequencies(&self) -> Vec<f64> {
        let total: u64 = self.letter_counts.iter().sum();
        let denom = (total + self.letter_counts.len() as u64) as f64;
        self.letter_counts.iter().map(|&n| (n + 1) as f64 / denom).collect()
    }

    pub fn symbol_id(&self, c: char) -> Option<SymbolId> {
        if c == SPACE {
            Some(self.space_id())
        } else {
            self.alphabet.index_of(c).map(|i| i as SymbolId)
        }
    }

    /// `ln P(next | context)`; only the last `order - 1` context symbols
    /// matter.
    pub fn log_prob_ids(&self, context: &[SymbolId], next: SymbolId) -> f64 {
        let keep = context.len().min(self.order - 1);
        let ctx = &context[context.len() - keep..];
        let full = pack(ctx);
        let w = next as u64 + 1;
        let mut backoff = 0.0;
        for len in (0..=ctx.len()).rev() {
            let h = full & mask(len);
            if let Some(e) = self.table.get(&((h << 8) | w)) {
                return backoff + e.log_prob;
            }
            if len > 0 {
                if let Some(e) = self.table.get(&h) {
                    backoff += e.log_backoff;
                }
            }
        }
        backoff + self.root_log_backoff - libm::log(self.vocab_size() as f64)
    }

    pub fn log_prob(&self, context: &[char], next: char) -> Result<f64, LmError> {
        let ctx = context
            .iter()
            .map(|&c| self.symbol_id(c).ok_or(LmError::UnknownSymbol(c)))
            .collect::<Result<Vec<_>, _>>()?;
        let next = self.symbol_id(next).ok_or(LmError::UnknownSymbol(next))?;
        Ok(self.log_prob_ids(&ctx, next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::LanguageId;

    fn ab() -> Alphabet {
        Alphabet::new(vec!['a', 'b'], LanguageId::Custom("ab".into())).unwrap()
    }

    fn assert_normalized(lm: &CharNGramLM, context: &[SymbolId]) {
        let sum: f64 = (0..lm.vocab_size() as u8).map(|w| libm::exp(lm.log_prob_ids(context, w))).sum();
        assert!((sum - 1.0).abs() < 1e-9, "context {context:?} sums to {sum}");
    }

    #[test]
    fn unigram_ml_counts() {
        let counts = NGramCounts::from_text("aab", &ab(), 1).unwrap();
        assert!((counts.ml_prob(&[], 'a').unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((counts.ml_prob(&[], 'b').unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    /// Counts for "abab" at order 2: bigrams ab:2, ba:1; unigrams a:2, b:2.
    /// Context a: C=2, T=1. Unigram level: C0=4, T0=2, V=4 (a, b, space,
    /// boundary), so P(a)=P(b)=(2+0.5)/6=5/12.
    /// P(b|a) = (2 + 5/12)/3 = 29/36, P(a|a) = (0 + 5/12)/3 = 5/36.
    #[test]
    fn bigram_hand_computed() {
        let counts = NGramCounts::from_text("abab", &ab(), 2).unwrap();
        assert_eq!(counts.ml_prob(&['a'], 'b'), Some(1.0));
        let lm = CharNGramLM::estimate(&counts);
        let pba = libm::exp(lm.log_prob(&['a'], 'b').unwrap());
        let paa = libm::exp(lm.log_prob(&['a'], 'a').unwrap());
        assert!((pba - 29.0 / 36.0).abs() < 1e-12);
        assert!((paa - 5.0 / 36.0).abs() < 1e-12);
        assert!(pba > paa);
        // Space never seen: only the uniform share, (2/6) * (1/4).
        let p_space = libm::exp(lm.log_prob(&[], ' ').unwrap());
        assert!((p_space - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn distributions_normalize() {
        let text = "the cat sat on the mat and the bat ate a hat";
        let lm = train_lm(text, &Alphabet::english(), 4).unwrap();
        let t = lm.symbol_id('t').unwrap();
        let h = lm.symbol_id('h').unwrap();
        let e = lm.symbol_id('e').unwrap();
        let sp = lm.space_id();
        for ctx in [&[][..], &[t], &[t, h], &[sp, t, h], &[h, e, sp], &[lm.boundary_id()], &[e, e, e]] {
            assert_normalized(&lm, ctx);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(train_lm("ab", &ab(), 3).unwrap_err(), LmError::CorpusTooSmall { len: 2, order: 3 });
        assert_eq!(train_lm("abc", &ab(), 2).unwrap_err(), LmError::UnknownSymbol('c'));
        assert_eq!(train_lm("ab", &ab(), 0).unwrap_err(), LmError::BadOrder(0));
    }

    #[test]
    fn entries_rebuild_identical_model() {
        let lm = train_lm("abba abab baab", &ab(), 3).unwrap();
        let rebuilt = CharNGramLM::from_parts(
            lm.order(),
            lm.alphabet().clone(),
            lm.root_log_backoff(),
            lm.letter_counts().to_vec(),
            lm.entries(),
        )
        .unwrap();
        for ctx in [&[][..], &[0], &[0, 1], &[2, 0], &[1, 1]] {
            for w in 0..4 {
                assert_eq!(lm.log_prob_ids(ctx, w), rebuilt.log_prob_ids(ctx, w));
            }
        }
    }
}
