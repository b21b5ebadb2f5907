//! Encipherment under the four spacing regimes.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::SPACE;
use crate::corpus::PlaintextChunk;
use crate::key::SubstitutionKey;
use crate::noise::NoiseLog;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("symbol {0:?} is outside the key's domain")]
    UnknownSymbol(char),
    #[error("spacing mode {mode} needs a key that {}enciphers the space", if *.needs_space { "" } else { "does not " })]
    SpaceModeMismatch { mode: SpacingMode, needs_space: bool },
}

/// How word spaces are treated when a plaintext is enciphered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingMode {
    /// Spaces are copied into the ciphertext unchanged.
    PlainSpace,
    /// The space is a key symbol like any letter.
    EncipheredSpace,
    /// Spaces are removed from plaintext and ciphertext.
    NoSpace,
    /// Spaces are removed from the ciphertext only; the target keeps them.
    NoSpaceGenerate,
}

impl SpacingMode {
    pub const ALL: [SpacingMode; 4] =
        [SpacingMode::PlainSpace, SpacingMode::EncipheredSpace, SpacingMode::NoSpace, SpacingMode::NoSpaceGenerate];

    pub fn as_str(self) -> &'static str {
        match self {
            SpacingMode::PlainSpace => "plain_space",
            SpacingMode::EncipheredSpace => "enciphered_space",
            SpacingMode::NoSpace => "no_space",
            SpacingMode::NoSpaceGenerate => "no_space_generate",
        }
    }

    /// Row label used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            SpacingMode::PlainSpace => "Ciphers with spaces",
            SpacingMode::EncipheredSpace => "Ciphers with enciphered spaces",
            SpacingMode::NoSpace => "No-space ciphers",
            SpacingMode::NoSpaceGenerate => "No-space ciphers + generate spaces",
        }
    }

    pub fn key_includes_space(self) -> bool {
        self == SpacingMode::EncipheredSpace
    }

    /// Whether source and target have the same length absent noise.
    pub fn preserves_length(self) -> bool {
        self != SpacingMode::NoSpaceGenerate
    }
}

impl fmt::Display for SpacingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown spacing mode {0:?}")]
pub struct ParseSpacingModeError(pub String);

impl FromStr for SpacingMode {
    type Err = ParseSpacingModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpacingMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ParseSpacingModeError(s.into()))
    }
}

/// One generated example: target plaintext, (possibly noisy) ciphertext and
/// everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherInstance {
    /// Target side. In `no_space` mode its spaces have been removed.
    pub plaintext: PlaintextChunk,
    pub ciphertext: Vec<char>,
    pub key: SubstitutionKey,
    pub spacing_mode: SpacingMode,
    #[serde(default)]
    pub noise_log: NoiseLog,
    /// Per-word permutations, `perm[i]` = index in the original word of the
    /// symbol now at position `i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anagram_perms: Option<Vec<Vec<usize>>>,
}

impl CipherInstance {
    pub fn ciphertext_string(&self) -> String {
        self.ciphertext.iter().collect()
    }

    /// The ciphertext with every logged noise edit undone.
    pub fn clean_ciphertext(&self) -> Vec<char> {
        self.noise_log.revert(&self.ciphertext).expect("noise log matches its own ciphertext")
    }
}

/// Encipher `chunk` with `key` under `mode`.
pub fn encipher(chunk: &PlaintextChunk, key: &SubstitutionKey, mode: SpacingMode) -> Result<CipherInstance, CipherError> {
    if key.includes_space() != mode.key_includes_space() {
        return Err(CipherError::SpaceModeMismatch { mode, needs_space: mode.key_includes_space() });
    }
    let mut ciphertext = Vec::with_capacity(chunk.text.len());
    for c in chunk.text.chars() {
        if c == SPACE {
            match mode {
                SpacingMode::PlainSpace => ciphertext.push(SPACE),
                SpacingMode::EncipheredSpace => ciphertext.push(key.encrypt(SPACE).ok_or(CipherError::UnknownSymbol(c))?),
                SpacingMode::NoSpace | SpacingMode::NoSpaceGenerate => {}
            }
        } else {
            ciphertext.push(key.encrypt(c).ok_or(CipherError::UnknownSymbol(c))?);
        }
    }
    let plaintext = if mode == SpacingMode::NoSpace {
        PlaintextChunk {
            text: chunk.text.chars().filter(|&c| c != SPACE).collect(),
            ..chunk.clone()
        }
    } else {
        chunk.clone()
    };
    Ok(CipherInstance {
        plaintext,
        ciphertext,
        key: key.clone(),
        spacing_mode: mode,
        noise_log: NoiseLog::default(),
        anagram_perms: None,
    })
}

/// Apply the inverse of `key` position-wise. Plain spaces pass through when
/// the key does not encipher the space.
pub fn decipher(ciphertext: &[char], key: &SubstitutionKey) -> Result<String, CipherError> {
    ciphertext
        .iter()
        .map(|&c| {
            if c == SPACE && !key.includes_space() {
                Ok(SPACE)
            } else {
                key.decrypt(c).ok_or(CipherError::UnknownSymbol(c))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{Alphabet, LanguageId};
    use crate::key::random_key;

    fn chunk(text: &str) -> PlaintextChunk {
        PlaintextChunk::new(text, LanguageId::English, 0)
    }

    #[test]
    fn doors_to_kffml() {
        let key = SubstitutionKey::from_pairs([('d', 'K'), ('o', 'F'), ('r', 'M'), ('s', 'L')]).unwrap();
        let inst = encipher(&chunk("doors"), &key, SpacingMode::PlainSpace).unwrap();
        assert_eq!(inst.ciphertext_string(), "KFFML");
    }

    #[test]
    fn identity_key_is_transparent() {
        let alpha = Alphabet::english();
        let key = SubstitutionKey::from_pairs(alpha.letters().iter().map(|&c| (c, c))).unwrap();
        let inst = encipher(&chunk("the invention of writing"), &key, SpacingMode::PlainSpace).unwrap();
        assert_eq!(inst.ciphertext_string(), "the invention of writing");
    }

    #[test]
    fn no_space_generate_keeps_target_spaces() {
        let key = random_key(&Alphabet::english(), false, 1);
        let inst = encipher(&chunk("a cat"), &key, SpacingMode::NoSpaceGenerate).unwrap();
        assert_eq!(inst.ciphertext.len(), 4);
        assert_eq!(inst.plaintext.len(), 5);

        let inst = encipher(&chunk("a cat"), &key, SpacingMode::NoSpace).unwrap();
        assert_eq!(inst.ciphertext.len(), 4);
        assert_eq!(inst.plaintext.text, "acat");
    }

    #[test]
    fn enciphered_space_uses_key() {
        let key = random_key(&Alphabet::english(), true, 1);
        let inst = encipher(&chunk("a cat"), &key, SpacingMode::EncipheredSpace).unwrap();
        assert!(!inst.ciphertext.contains(&' '));
        assert_eq!(inst.ciphertext[1], key.encrypt(' ').unwrap());
        assert_eq!(decipher(&inst.ciphertext, &key).unwrap(), "a cat");
    }

    #[test]
    fn errors() {
        let key = SubstitutionKey::from_pairs([('a', 'X')]).unwrap();
        assert_eq!(
            encipher(&chunk("ab"), &key, SpacingMode::PlainSpace),
            Err(CipherError::UnknownSymbol('b'))
        );
        assert!(matches!(
            encipher(&chunk("a"), &key, SpacingMode::EncipheredSpace),
            Err(CipherError::SpaceModeMismatch { .. })
        ));
        assert_eq!("bogus".parse::<SpacingMode>(), Err(ParseSpacingModeError("bogus".into())));
    }
}
