//! Core algorithms for studying 1:1 substitution-cipher decipherment.
//!
//! Everything in this crate is pure computation over in-memory data and builds
//! under `#![no_std]` with `alloc`. File formats, the command-line tool and the
//! experiment harness live in the `decipher-workbench` crate.
//!
//! The pieces, in pipeline order:
//!
//! * [`corpus`]: text normalization and word-aligned chunking of plaintext.
//! * [`key`], [`cipher`], [`noise`], [`anagram`]: random keys, encipherment
//!   under the four spacing regimes, transcription noise and per-word
//!   anagramming.
//! * [`freqcode`]: frequency-rank encoding of ciphertexts and the sorted-bag
//!   encoding used for anagrammed ciphers.
//! * [`lm`] and [`solver`]: an interpolated Witten-Bell character n-gram model
//!   and a beam search over partial keys scored by it.
//! * [`metrics`]: symbol error rate, character-level edit rate and word
//!   accuracy.
#![no_std]

extern crate alloc;

pub mod alphabet;
pub mod anagram;
pub mod cipher;
pub mod corpus;
pub mod freqcode;
pub mod key;
pub mod lm;
pub mod metrics;
pub mod noise;
pub mod seed;
pub mod solver;

pub use alphabet::{Alphabet, LanguageId, SEPARATOR_TOKEN, SPACE};
pub use cipher::{decipher, encipher, CipherInstance, SpacingMode};
pub use corpus::{chunk, preprocess, PlaintextChunk};
pub use freqcode::{frequency_encode, sorted_bag_encode, FreqEncodedSeq, RankTable, RankToken};
pub use key::{random_key, SubstitutionKey};
pub use lm::{train_lm, CharNGramLM};
pub use metrics::{ser, ter, word_accuracy, EditCounts, EvalReport};
pub use noise::{inject_noise, NoiseKind, NoiseLog, NoiseSpec};
pub use solver::{solve, SolverConfig};
