//! Evaluation metrics: symbol error rate, character-level edit rate and word
//! accuracy.
//!
//! Edits are named from the hypothesis' point of view: an insertion is an
//! extra hypothesis character, a deletion is a reference character the
//! hypothesis lacks.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::SPACE;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("SER needs equal lengths (hypothesis {hyp}, reference {reference})")]
    LengthMismatch { hyp: usize, reference: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
}

impl EditCounts {
    pub fn total(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerScore {
    pub ter: f64,
    pub edits: EditCounts,
}

/// Fraction of positions where hypothesis and reference differ.
pub fn ser<T: PartialEq>(hyp: &[T], reference: &[T]) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if hyp.len() != reference.len() {
        return Err(MetricError::LengthMismatch { hyp: hyp.len(), reference: reference.len() });
    }
    let wrong = hyp.iter().zip(reference).filter(|(h, r)| h != r).count();
    Ok(wrong as f64 / reference.len() as f64)
}

/// Unit-cost Levenshtein distance.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit counts of one optimal alignment. Backtracking prefers a diagonal
/// step (match or substitution), then an insertion, then a deletion.
pub fn align<T: PartialEq>(hyp: &[T], reference: &[T]) -> EditCounts {
    let (m, n) = (hyp.len(), reference.len());
    let w = n + 1;
    let mut d = vec![0usize; (m + 1) * w];
    for (j, cell) in d[..w].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=m {
        d[i * w] = i;
        for j in 1..=n {
            let diag = d[(i - 1) * w + j - 1] + usize::from(hyp[i - 1] != reference[j - 1]);
            d[i * w + j] = diag.min(d[(i - 1) * w + j] + 1).min(d[i * w + j - 1] + 1);
        }
    }

    let mut counts = EditCounts::default();
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let mismatch = usize::from(hyp[i - 1] != reference[j - 1]);
            if d[(i - 1) * w + j - 1] + mismatch == here {
                counts.substitutions += mismatch;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * w + j] + 1 == here {
            counts.insertions += 1;
            i -= 1;
        } else {
            counts.deletions += 1;
            j -= 1;
        }
    }
    counts
}

/// Minimal edits divided by the reference length.
pub fn ter<T: PartialEq>(hyp: &[T], reference: &[T]) -> Result<TerScore, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let edits = align(hyp, reference);
    Ok(TerScore { ter: edits.total() as f64 / reference.len() as f64, edits })
}

/// Positional word accuracy: word `i` of the hypothesis is right when it
/// equals word `i` of the reference. Extra hypothesis words are ignored and
/// missing ones count as wrong.
pub fn word_accuracy(hyp: &str, reference: &str) -> Result<f64, MetricError> {
    let words = |s: &str| s.split(SPACE).filter(|w| !w.is_empty()).map(String::from).collect::<Vec<_>>();
    let (h, r) = (words(hyp), words(reference));
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let right = r.iter().zip(&h).filter(|(a, b)| a == b).count();
    Ok(right as f64 / r.len() as f64)
}

/// Scores for one cipher. A cipher the solver failed on carries `error` and
/// no metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CipherScore {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ser: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_acc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edit_counts: Option<EditCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CipherScore {
    /// Score `hyp` against `reference`; SER only when the lengths agree.
    pub fn compute(id: impl Into<String>, hyp: &str, reference: &str) -> Result<Self, MetricError> {
        let h: Vec<char> = hyp.chars().collect();
        let r: Vec<char> = reference.chars().collect();
        let ter_score = ter(&h, &r)?;
        Ok(Self {
            id: id.into(),
            ser: ser(&h, &r).ok(),
            ter: Some(ter_score.ter),
            word_acc: word_accuracy(hyp, reference).ok(),
            edit_counts: Some(ter_score.edits),
            error: None,
        })
    }

    pub fn failed(id: impl Into<String>, error: impl Into<String>) -> Self {
        Self { id: id.into(), ser: None, ter: None, word_acc: None, edit_counts: None, error: Some(error.into()) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub ser: Option<f64>,
    pub ter: Option<f64>,
    pub word_acc: Option<f64>,
    pub scored: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_cipher: Vec<CipherScore>,
    pub aggregate: Aggregate,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl EvalReport {
    /// Aggregate = arithmetic mean over the ciphers that have the metric.
    pub fn from_scores(per_cipher: Vec<CipherScore>) -> Self {
        let aggregate = Aggregate {
            ser: mean(per_cipher.iter().map(|s| s.ser)),
            ter: mean(per_cipher.iter().map(|s| s.ter)),
            word_acc: mean(per_cipher.iter().map(|s| s.word_acc)),
            scored: per_cipher.iter().filter(|s| s.error.is_none()).count(),
            failed: per_cipher.iter().filter(|s| s.error.is_some()).count(),
        };
        Self { per_cipher, aggregate }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn ser_examples() {
        assert_eq!(ser(&c("abc"), &c("abc")).unwrap(), 0.0);
        assert!((ser(&c("abd"), &c("abc")).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            ser(&c("ab"), &c("abc")),
            Err(MetricError::LengthMismatch { hyp: 2, reference: 3 })
        );
        assert_eq!(ser::<char>(&[], &[]), Err(MetricError::EmptyReference));
    }

    #[test]
    fn ter_examples() {
        assert_eq!(ter(&c("abc"), &c("abc")).unwrap().ter, 0.0);
        let t = ter(&c("b"), &c("ab")).unwrap();
        assert_eq!(t.ter, 0.5);
        assert_eq!(t.edits, EditCounts { substitutions: 0, insertions: 0, deletions: 1 });
        let t = ter(&c("abcd"), &c("ab")).unwrap();
        assert_eq!(t.edits, EditCounts { substitutions: 0, insertions: 2, deletions: 0 });
        assert_eq!(t.ter, 1.0);
        assert_eq!(ter::<char>(&c("a"), &[]), Err(MetricError::EmptyReference));
    }

    #[test]
    fn tie_prefers_substitution() {
        // "ab" vs "ba": two substitutions or one insertion + one deletion.
        let e = align(&c("ab"), &c("ba"));
        assert_eq!(e, EditCounts { substitutions: 2, insertions: 0, deletions: 0 });
    }

    #[test]
    fn word_accuracy_examples() {
        assert_eq!(word_accuracy("the cat", "the cat").unwrap(), 1.0);
        assert_eq!(word_accuracy("the bat", "the cat").unwrap(), 0.5);
        assert_eq!(word_accuracy("the", "the cat").unwrap(), 0.5);
        assert_eq!(word_accuracy("the cat sat", "the cat").unwrap(), 1.0);
        assert_eq!(
            word_accuracy("the invention of britain systems", "the invention of writing systems").unwrap(),
            0.8
        );
        assert_eq!(word_accuracy("x", ""), Err(MetricError::EmptyReference));
    }

    #[test]
    fn report_means() {
        let scores = alloc::vec![
            CipherScore::compute("a", "abc", "abc").unwrap(),
            CipherScore::compute("b", "abd", "abc").unwrap(),
            CipherScore::failed("c", "boom"),
        ];
        let report = EvalReport::from_scores(scores);
        assert!((report.aggregate.ser.unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(report.aggregate.scored, 2);
        assert_eq!(report.aggregate.failed, 1);
    }
}
