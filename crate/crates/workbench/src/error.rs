use std::io;
use std::path::{Path, PathBuf};

use decipher_core::alphabet::AlphabetError;
use decipher_core::anagram::AnagramError;
use decipher_core::cipher::CipherError;
use decipher_core::corpus::CorpusError;
use decipher_core::freqcode::FreqError;
use decipher_core::lm::LmError;
use decipher_core::metrics::MetricError;
use decipher_core::noise::NoiseError;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0} is empty")]
    EmptyInput(String),
    #[error("{split} split for {language}, length {length}: corpus exhausted after {produced} of {requested} chunks")]
    CorpusExhausted { split: String, language: String, length: usize, requested: usize, produced: usize },
    #[error("test set is empty")]
    EmptyTestSet,
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Anagram(#[from] AnagramError),
    #[error(transparent)]
    Freq(#[from] FreqError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl Error {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn parse(path: &Path, line: usize, source: serde_json::Error) -> Self {
        Error::Parse { path: path.to_path_buf(), line, source }
    }
}
