//! Frequency-rank encoding.
//!
//! Each cipher symbol is replaced by its frequency rank within the ciphertext
//! (0 = most frequent). Ties go to the symbol that occurs first. Counts and
//! first occurrences survive any bijective relabeling of the symbols, so two
//! encipherments of the same plaintext encode identically whatever their keys.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{SEPARATOR_TOKEN, SPACE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreqError {
    #[error("symbol {0} has no rank in the table")]
    UnknownSymbol(String),
    #[error("bad token {0:?} in encoded sequence")]
    BadToken(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RankToken {
    Rank(u32),
    Separator,
}

impl RankToken {
    pub fn rank(self) -> Option<u32> {
        match self {
            RankToken::Rank(r) => Some(r),
            RankToken::Separator => None,
        }
    }
}

/// Symbols in rank order with their counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<(T, usize)>", from = "Vec<(T, usize)>")]
#[serde(bound(serialize = "T: Ord + Clone + Serialize", deserialize = "T: Ord + Clone + Deserialize<'de>"))]
pub struct RankTable<T: Ord> {
    symbols: Vec<T>,
    counts: Vec<usize>,
    index: BTreeMap<T, u32>,
}

impl<T: Ord + Clone> From<Vec<(T, usize)>> for RankTable<T> {
    fn from(entries: Vec<(T, usize)>) -> Self {
        Self::from_ranked(entries)
    }
}

impl<T: Ord + Clone> From<RankTable<T>> for Vec<(T, usize)> {
    fn from(table: RankTable<T>) -> Self {
        table.symbols.into_iter().zip(table.counts).collect()
    }
}

impl<T: Ord + Clone> RankTable<T> {
    /// Rank the non-separator symbols of `seq` by descending count, breaking
    /// ties by first occurrence.
    pub fn build(seq: &[T], is_separator: impl Fn(&T) -> bool) -> Self {
        // symbol -> (count, first index)
        let mut stats: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
        for (i, s) in seq.iter().enumerate().filter(|(_, s)| !is_separator(s)) {
            stats.entry(s).or_insert((0, i)).0 += 1;
        }
        let mut ranked: Vec<(&T, usize, usize)> = stats.into_iter().map(|(s, (n, first))| (s, n, first)).collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        Self::from_ranked(ranked.into_iter().map(|(s, n, _)| (s.clone(), n)))
    }

    /// Table from (symbol, count) pairs already in rank order.
    pub fn from_ranked(entries: impl IntoIterator<Item = (T, usize)>) -> Self {
        let (symbols, counts): (Vec<T>, Vec<usize>) = entries.into_iter().unzip();
        let index = symbols.iter().cloned().zip(0u32..).collect();
        Self { symbols, counts, index }
    }

    pub fn rank_of(&self, symbol: &T) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, rank: u32) -> Option<&T> {
        self.symbols.get(rank as usize)
    }

    pub fn count(&self, rank: u32) -> Option<usize> {
        self.counts.get(rank as usize).copied()
    }

    pub fn symbols(&self) -> &[T] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// An encoded sequence together with the table that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Ord + Clone + Serialize", deserialize = "T: Ord + Clone + Deserialize<'de>"))]
pub struct FreqEncodedSeq<T: Ord> {
    pub tokens: Vec<RankToken>,
    pub rank_table: RankTable<T>,
}

impl<T: Ord> FreqEncodedSeq<T> {
    pub fn render(&self) -> String {
        render_tokens(&self.tokens)
    }

    pub fn ranks(&self) -> impl Iterator<Item = u32> + '_ {
        self.tokens.iter().filter_map(|t| t.rank())
    }
}

/// Encode with a caller-supplied separator predicate.
pub fn frequency_encode_by<T: Ord + Clone>(seq: &[T], is_separator: impl Fn(&T) -> bool) -> FreqEncodedSeq<T> {
    let table = RankTable::build(seq, &is_separator);
    let tokens = seq
        .iter()
        .map(|s| {
            if is_separator(s) {
                RankToken::Separator
            } else {
                RankToken::Rank(table.rank_of(s).expect("table built from this sequence"))
            }
        })
        .collect();
    FreqEncodedSeq { tokens, rank_table: table }
}

/// Frequency-encode a character ciphertext. With `space_is_symbol` unset the
/// plain space is a separator and takes no rank; with it set (enciphered-space
/// regime) a space in the input is ranked like any other symbol.
pub fn frequency_encode(ciphertext: &[char], space_is_symbol: bool) -> FreqEncodedSeq<char> {
    frequency_encode_by(ciphertext, |&c| !space_is_symbol && c == SPACE)
}

/// Map each symbol through `table` and sort the ranks within every word.
pub fn sorted_bag_encode_by<T: Ord + Clone + core::fmt::Debug>(
    seq: &[T],
    table: &RankTable<T>,
    is_separator: impl Fn(&T) -> bool,
) -> Result<FreqEncodedSeq<T>, FreqError> {
    let mut tokens = seq
        .iter()
        .map(|s| {
            if is_separator(s) {
                Ok(RankToken::Separator)
            } else {
                table.rank_of(s).map(RankToken::Rank).ok_or_else(|| FreqError::UnknownSymbol(alloc::format!("{s:?}")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    sort_within_words(&mut tokens);
    Ok(FreqEncodedSeq { tokens, rank_table: table.clone() })
}

/// Sorted-bag encoding of an anagrammed plain-space ciphertext.
pub fn sorted_bag_encode(anagrammed: &[char], table: &RankTable<char>) -> Result<FreqEncodedSeq<char>, FreqError> {
    sorted_bag_encode_by(anagrammed, table, |&c| c == SPACE)
}

/// Sort the ranks between consecutive separators in ascending order.
pub fn sort_within_words(tokens: &mut [RankToken]) {
    for word in tokens.split_mut(|t| *t == RankToken::Separator) {
        word.sort_unstable();
    }
}

/// Space-separated integers, `_` for separators.
pub fn render_tokens(tokens: &[RankToken]) -> String {
    let mut out = String::with_capacity(tokens.len() * 3);
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match t {
            RankToken::Rank(r) => {
                let _ = write!(out, "{r}");
            }
            RankToken::Separator => out.push_str(SEPARATOR_TOKEN),
        }
    }
    out
}

pub fn parse_tokens(line: &str) -> Result<Vec<RankToken>, FreqError> {
    line.split_whitespace()
        .map(|t| {
            if t == SEPARATOR_TOKEN {
                Ok(RankToken::Separator)
            } else {
                t.parse().map(RankToken::Rank).map_err(|_| FreqError::BadToken(t.into()))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn counts_descending() {
        assert_eq!(frequency_encode(&chars("XYYZZZ"), false).render(), "2 1 1 0 0 0");
        assert_eq!(frequency_encode(&chars("AAAA"), false).render(), "0 0 0 0");
    }

    #[test]
    fn ties_break_by_first_occurrence() {
        let enc = frequency_encode(&chars("BABA C"), false);
        assert_eq!(enc.render(), "0 1 0 1 _ 2");
        assert_eq!(enc.rank_table.symbols(), &['B', 'A', 'C']);
        assert_eq!(enc.rank_table.count(0), Some(2));
    }

    #[test]
    fn space_as_symbol() {
        let enc = frequency_encode(&chars("a b c"), true);
        assert_eq!(enc.render(), "1 0 2 0 3");
    }

    #[test]
    fn sorted_bag_single_symbol_and_unknown() {
        let table = RankTable::build(&chars("ab"), |&c| c == ' ');
        assert_eq!(sorted_bag_encode(&chars("a"), &table).unwrap().render(), "0");
        assert_eq!(sorted_bag_encode(&chars("ba a"), &table).unwrap().render(), "0 1 _ 0");
        assert_eq!(
            sorted_bag_encode(&chars("q"), &table),
            Err(FreqError::UnknownSymbol("'q'".into()))
        );
    }

    #[test]
    fn token_round_trip() {
        let toks = vec![RankToken::Rank(11), RankToken::Separator, RankToken::Rank(0)];
        assert_eq!(parse_tokens(&render_tokens(&toks)).unwrap(), toks);
        assert_eq!(parse_tokens("1 x"), Err(FreqError::BadToken("x".into())));
    }

    #[test]
    fn generic_symbols() {
        let seq = vec!["sun", "moon", "sun", "|", "mars"];
        let enc = frequency_encode_by(&seq, |s| *s == "|");
        assert_eq!(enc.render(), "0 1 0 _ 2");
    }
}
