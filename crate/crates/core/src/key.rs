//! Substitution keys.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, SPACE};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("plaintext symbol {0:?} is mapped twice")]
    DuplicatePlain(char),
    #[error("cipher symbol {0:?} is the image of two plaintext symbols")]
    DuplicateCipher(char),
    #[error("cipher symbol {0:?} is reserved")]
    ReservedCipher(char),
    #[error("includes_space flag disagrees with the mapping")]
    SpaceFlagMismatch,
}

/// Bijection between plaintext symbols and cipher symbols.
///
/// When `includes_space` is set the space is part of the domain and is
/// enciphered like any letter; otherwise spaces are outside the key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawKey", into = "RawKey")]
pub struct SubstitutionKey {
    /// (plain, cipher) sorted by plain.
    forward: Vec<(char, char)>,
    /// (cipher, plain) sorted by cipher.
    inverse: Vec<(char, char)>,
    includes_space: bool,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawKey {
    mapping: Vec<(char, char)>,
    includes_space: bool,
    seed: Option<u64>,
}

impl TryFrom<RawKey> for SubstitutionKey {
    type Error = KeyError;

    fn try_from(raw: RawKey) -> Result<Self, KeyError> {
        let mut key = SubstitutionKey::from_pairs(raw.mapping)?;
        key.seed = raw.seed;
        if key.includes_space != raw.includes_space {
            return Err(KeyError::SpaceFlagMismatch);
        }
        Ok(key)
    }
}

impl From<SubstitutionKey> for RawKey {
    fn from(key: SubstitutionKey) -> Self {
        RawKey { mapping: key.forward, includes_space: key.includes_space, seed: key.seed }
    }
}

impl SubstitutionKey {
    /// Build a key from explicit (plain, cipher) pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (char, char)>) -> Result<Self, KeyError> {
        let mut forward: Vec<(char, char)> = pairs.into_iter().collect();
        forward.sort_unstable();
        for w in forward.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(KeyError::DuplicatePlain(w[0].0));
            }
        }
        let mut inverse: Vec<(char, char)> = forward.iter().map(|&(p, c)| (c, p)).collect();
        inverse.sort_unstable();
        for w in inverse.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(KeyError::DuplicateCipher(w[0].0));
            }
        }
        let includes_space = forward.iter().any(|&(p, _)| p == SPACE);
        // A plain-space cipher must be able to tell a passed-through space
        // from an enciphered letter.
        if !includes_space {
            if let Some(&(c, _)) = inverse.iter().find(|&&(c, _)| c == SPACE) {
                return Err(KeyError::ReservedCipher(c));
            }
        }
        Ok(Self { forward, inverse, includes_space, seed: None })
    }

    pub fn includes_space(&self) -> bool {
        self.includes_space
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn encrypt(&self, plain: char) -> Option<char> {
        self.forward.binary_search_by_key(&plain, |&(p, _)| p).ok().map(|i| self.forward[i].1)
    }

    pub fn decrypt(&self, cipher: char) -> Option<char> {
        self.inverse.binary_search_by_key(&cipher, |&(c, _)| c).ok().map(|i| self.inverse[i].1)
    }

    /// (plain, cipher) pairs in plaintext order.
    pub fn pairs(&self) -> &[(char, char)] {
        &self.forward
    }

    /// Cipher symbols of the key's image, sorted.
    pub fn cipher_symbols(&self) -> impl Iterator<Item = char> + '_ {
        self.inverse.iter().map(|&(c, _)| c)
    }

    pub fn inverse(&self) -> SubstitutionKey {
        let mut inv = SubstitutionKey {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            includes_space: self.inverse.iter().any(|&(c, _)| c == SPACE),
            seed: self.seed,
        };
        inv.forward.sort_unstable();
        inv.inverse.sort_unstable();
        inv
    }
}

/// The first `n` glyphs of the cipher inventory: `A`-`Z`, `0`-`9`, Greek
/// capitals, then CJK ideographs. None of them collide with the space or the
/// `_` separator token.
pub fn cipher_glyphs(n: usize) -> Vec<char> {
    let greek = (0x391u32..=0x3A9).filter(|&c| c != 0x3A2).filter_map(char::from_u32);
    let cjk = (0x4E00u32..=0x9FFF).filter_map(char::from_u32);
    ('A'..='Z').chain('0'..='9').chain(greek).chain(cjk).take(n).collect()
}

/// Draw a uniformly random key over the alphabet (plus the space when
/// `include_space`), deterministic in `seed`.
pub fn random_key(alphabet: &Alphabet, include_space: bool, seed: u64) -> SubstitutionKey {
    let domain = if include_space { alphabet.symbols_with_space() } else { alphabet.letters().to_vec() };
    let mut glyphs = cipher_glyphs(domain.len());
    glyphs.shuffle(&mut seed::rng(seed));
    let mut key = SubstitutionKey::from_pairs(domain.into_iter().zip(glyphs))
        .expect("distinct domain and glyphs form a bijection");
    key.seed = Some(seed);
    key
}
