//! Plaintext alphabets and language tags.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The word separator in plaintext and plain-space ciphertext.
pub const SPACE: char = ' ';

/// How a space is rendered in token files and encoded sequences.
pub const SEPARATOR_TOKEN: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("alphabet has no letters")]
    Empty,
    #[error("letter {0:?} appears more than once")]
    DuplicateLetter(char),
    #[error("letter {0:?} is whitespace and cannot be part of an alphabet")]
    WhitespaceLetter(char),
    #[error("alphabet has {0} letters; at most 253 are supported")]
    TooLarge(usize),
}

/// Language tag: one of the fourteen built-in corpora languages or a
/// user-defined name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum LanguageId {
    Catalan,
    Danish,
    Dutch,
    English,
    Finnish,
    French,
    German,
    Hungarian,
    Italian,
    Latin,
    Norwegian,
    Portuguese,
    Spanish,
    Swedish,
    Custom(String),
}

impl LanguageId {
    pub const BUILTIN: [LanguageId; 14] = [
        LanguageId::Catalan,
        LanguageId::Danish,
        LanguageId::Dutch,
        LanguageId::English,
        LanguageId::Finnish,
        LanguageId::French,
        LanguageId::German,
        LanguageId::Hungarian,
        LanguageId::Italian,
        LanguageId::Latin,
        LanguageId::Norwegian,
        LanguageId::Portuguese,
        LanguageId::Spanish,
        LanguageId::Swedish,
    ];

    /// Two-letter code for built-in languages, the name itself otherwise.
    pub fn code(&self) -> &str {
        match self {
            LanguageId::Catalan => "ca",
            LanguageId::Danish => "da",
            LanguageId::Dutch => "nl",
            LanguageId::English => "en",
            LanguageId::Finnish => "fi",
            LanguageId::French => "fr",
            LanguageId::German => "de",
            LanguageId::Hungarian => "hu",
            LanguageId::Italian => "it",
            LanguageId::Latin => "la",
            LanguageId::Norwegian => "no",
            LanguageId::Portuguese => "pt",
            LanguageId::Spanish => "es",
            LanguageId::Swedish => "sv",
            LanguageId::Custom(name) => name,
        }
    }

    /// Accents are stripped for every language except English.
    pub fn strips_accents(&self) -> bool {
        !matches!(self, LanguageId::English)
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl From<&str> for LanguageId {
    fn from(s: &str) -> Self {
        let lower = s.to_ascii_lowercase();
        let builtin = match lower.as_str() {
            "ca" | "catalan" => Some(LanguageId::Catalan),
            "da" | "danish" => Some(LanguageId::Danish),
            "nl" | "dutch" => Some(LanguageId::Dutch),
            "en" | "english" => Some(LanguageId::English),
            "fi" | "finnish" => Some(LanguageId::Finnish),
            "fr" | "french" => Some(LanguageId::French),
            "de" | "german" => Some(LanguageId::German),
            "hu" | "hungarian" => Some(LanguageId::Hungarian),
            "it" | "italian" => Some(LanguageId::Italian),
            "la" | "latin" => Some(LanguageId::Latin),
            "no" | "norwegian" => Some(LanguageId::Norwegian),
            "pt" | "portuguese" => Some(LanguageId::Portuguese),
            "es" | "spanish" => Some(LanguageId::Spanish),
            "sv" | "swedish" => Some(LanguageId::Swedish),
            _ => None,
        };
        builtin.unwrap_or_else(|| LanguageId::Custom(s.to_string()))
    }
}

impl From<String> for LanguageId {
    fn from(s: String) -> Self {
        LanguageId::from(s.as_str())
    }
}

impl From<LanguageId> for String {
    fn from(id: LanguageId) -> Self {
        id.code().to_string()
    }
}

impl FromStr for LanguageId {
    type Err = core::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(LanguageId::from(s))
    }
}

/// Ordered plaintext letters of one language plus the reserved space token.
///
/// Letter order fixes the letter indices used by the language model and the
/// solver. Built-in languages all use `a..=z`: accented letters are folded
/// to their base letter during preprocessing, and letters without a Latin
/// base (`ß`, `æ`, `ø`, ...) are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    letters: Vec<char>,
    space_token: char,
    language: LanguageId,
}

impl Alphabet {
    pub fn new(letters: Vec<char>, language: LanguageId) -> Result<Self, AlphabetError> {
        if letters.is_empty() {
            return Err(AlphabetError::Empty);
        }
        // Letter ids, space and boundary must fit in a byte for n-gram packing.
        if letters.len() > 253 {
            return Err(AlphabetError::TooLarge(letters.len()));
        }
        for (i, &c) in letters.iter().enumerate() {
            if c.is_whitespace() {
                return Err(AlphabetError::WhitespaceLetter(c));
            }
            if letters[..i].contains(&c) {
                return Err(AlphabetError::DuplicateLetter(c));
            }
        }
        Ok(Self { letters, space_token: SPACE, language })
    }

    /// The `a..=z` alphabet tagged with `language`.
    pub fn latin(language: LanguageId) -> Self {
        Self { letters: ('a'..='z').collect(), space_token: SPACE, language }
    }

    pub fn english() -> Self {
        Self::latin(LanguageId::English)
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn space_token(&self) -> char {
        self.space_token
    }

    pub fn language(&self) -> &LanguageId {
        &self.language
    }

    pub fn contains(&self, c: char) -> bool {
        self.letters.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.letters.iter().position(|&l| l == c)
    }

    /// Letters followed by the space token.
    pub fn symbols_with_space(&self) -> Vec<char> {
        let mut out = self.letters.clone();
        out.push(self.space_token);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_duplicates_and_whitespace() {
        assert_eq!(
            Alphabet::new(vec!['a', 'b', 'a'], LanguageId::English),
            Err(AlphabetError::DuplicateLetter('a'))
        );
        assert_eq!(
            Alphabet::new(vec!['a', ' '], LanguageId::English),
            Err(AlphabetError::WhitespaceLetter(' '))
        );
        assert_eq!(Alphabet::new(vec![], LanguageId::English), Err(AlphabetError::Empty));
    }

    #[test]
    fn language_codes_round_trip() {
        for lang in LanguageId::BUILTIN.iter() {
            assert_eq!(&LanguageId::from(lang.code()), lang);
        }
        assert_eq!(LanguageId::from("Klingon"), LanguageId::Custom("Klingon".into()));
        assert!(!LanguageId::English.strips_accents());
        assert!(LanguageId::French.strips_accents());
    }
}
