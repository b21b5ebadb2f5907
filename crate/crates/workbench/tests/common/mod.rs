#![allow(dead_code)]

use decipher_core::{Alphabet, LanguageId};
use decipher_workbench::config::ExperimentConfig;
use decipher_workbench::dataset::{Corpora, LanguageText};
use decipher_workbench::textio::write_text;

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was", "with", "be", "by", "on", "not",
    "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an", "had", "they", "you", "were",
    "their", "one", "all", "we", "can", "her", "has", "there", "been", "if", "more", "when", "will", "would",
];

/// Pseudo-random word text of about `chars` characters, fixed by `salt`.
pub fn word_text(chars: usize, salt: u64) -> String {
    let mut state = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut out = String::new();
    while out.len() < chars {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        // Squaring skews the draw toward the front of the list.
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        let w = WORDS[((u * u) * WORDS.len() as f64) as usize];
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

pub fn corpora(languages: &[LanguageId], train_chars: usize, heldout_chars: usize) -> Corpora {
    let mut c = Corpora::default();
    for (i, lang) in languages.iter().enumerate() {
        c.insert(
            lang,
            LanguageText {
                alphabet: Alphabet::latin(lang.clone()),
                train: word_text(train_chars, 2 * i as u64 + 1),
                heldout: word_text(heldout_chars, 2 * i as u64 + 2),
            },
        );
    }
    c
}

/// Config parsed from TOML lines, with a placeholder corpus per language.
pub fn config(languages: &[&str], extra: &str) -> ExperimentConfig {
    let mut text = format!(
        "languages = [{}]\n{extra}\n",
        languages.iter().map(|l| format!("\"{l}\"")).collect::<Vec<_>>().join(", ")
    );
    for l in languages {
        text.push_str(&format!("[corpora.{l}]\ntrain = \"train.txt\"\nheldout = \"heldout.txt\"\n"));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    write_text(&path, &text).unwrap();
    ExperimentConfig::load(&path).unwrap()
}
