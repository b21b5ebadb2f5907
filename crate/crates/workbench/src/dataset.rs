//! Parallel-corpus export: cipher/plaintext pairs for the train, dev and
//! test splits, written as `.src`/`.tgt` token files plus a JSON-lines
//! manifest.
//!
//! Each language draws its dev chunks from the start of its training text
//! and its train chunks from what follows, so the two never share text.
//! Test chunks come from the held-out document. Every example gets its own
//! key, whose seed is derived from the experiment seed, the split, the
//! language, the chunk length and the example index.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use decipher_core::anagram::anagram;
use decipher_core::corpus::{ChunkEvent, Chunker};
use decipher_core::{
    encipher, frequency_encode, inject_noise, preprocess, random_key, seed, sorted_bag_encode, Alphabet,
    CipherInstance, LanguageId, PlaintextChunk, RankTable, SpacingMode, SPACE,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Encoding, ExperimentConfig};
use crate::error::{Error, Result};
use crate::textio::{chars_to_tokens, read_text, write_jsonl, write_lines};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn count(self, config: &ExperimentConfig) -> usize {
        match self {
            Split::Train => config.train_count,
            Split::Dev => config.dev_count,
            Split::Test => config.test_count,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Metadata for one example; line `i` of the manifest describes line `i`
/// of the `.src` and `.tgt` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub split: Split,
    pub max_len: usize,
    pub encoding: Encoding,
    pub key_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anagram_seed: Option<u64>,
    pub instance: CipherInstance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub source: String,
    pub target: String,
    pub record: ManifestRecord,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetBundle {
    pub splits: BTreeMap<Split, Vec<Example>>,
}

impl DatasetBundle {
    pub fn get(&self, split: Split) -> &[Example] {
        self.splits.get(&split).map_or(&[], Vec::as_slice)
    }

    /// Write `<split>.src`, `<split>.tgt` and `<split>.manifest.jsonl` for
    /// every split present.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for (split, examples) in &self.splits {
            write_split(dir, *split, examples)?;
        }
        Ok(())
    }
}

pub fn write_split(dir: &Path, split: Split, examples: &[Example]) -> Result<()> {
    let name = split.as_str();
    write_lines(&dir.join(format!("{name}.src")), examples.iter().map(|e| &e.source))?;
    write_lines(&dir.join(format!("{name}.tgt")), examples.iter().map(|e| &e.target))?;
    let records: Vec<&ManifestRecord> = examples.iter().map(|e| &e.record).collect();
    write_jsonl(&dir.join(format!("{name}.manifest.jsonl")), &records)
}

/// Source-side tokens for an instance.
pub fn encode_source(instance: &CipherInstance, encoding: Encoding) -> Result<String> {
    let ct = &instance.ciphertext;
    Ok(match encoding {
        Encoding::Frequency => {
            frequency_encode(ct, instance.spacing_mode == SpacingMode::EncipheredSpace).render()
        }
        Encoding::Raw => chars_to_tokens(ct.iter().copied()),
        Encoding::SortedBag => {
            let table = RankTable::build(ct, |&c| c == SPACE);
            sorted_bag_encode(ct, &table)?.render()
        }
    })
}

pub fn encode_target(instance: &CipherInstance) -> String {
    chars_to_tokens(instance.plaintext.text.chars())
}

/// Split `total` examples over `lengths` so that every length gets the same
/// character budget: the count for length `L` is proportional to `1 / L`.
/// Rounding uses largest remainders, so the counts sum to `total`.
pub fn counts_per_length(total: usize, lengths: &[usize]) -> Vec<usize> {
    let weights: Vec<f64> = lengths.iter().map(|&l| 1.0 / l as f64).collect();
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// Counts for a fixed character budget shared equally by `lengths`.
pub fn counts_for_budget(chars: usize, lengths: &[usize]) -> Vec<usize> {
    let share = chars as f64 / lengths.len() as f64;
    lengths.iter().map(|&l| (share / l as f64).round() as usize).collect()
}

/// `total` split into `parts` near-equal shares, the first ones one larger.
pub fn equal_shares(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| total / parts + usize::from(i < total % parts)).collect()
}

/// Preprocessed training and held-out text for one language.
#[derive(Debug, Clone)]
pub struct LanguageText {
    pub alphabet: Alphabet,
    pub train: String,
    pub heldout: String,
}

/// Preprocessed text for every language the config mentions.
#[derive(Debug, Clone, Default)]
pub struct Corpora {
    texts: BTreeMap<String, LanguageText>,
}

impl Corpora {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let mut texts = BTreeMap::new();
        for lang in &config.languages {
            let src = &config.corpora[lang.code()];
            let alphabet = src.alphabet(lang)?;
            let train = preprocess(&read_text(&src.train)?, &alphabet)?;
            let heldout = preprocess(&read_text(&src.heldout)?, &alphabet)?;
            texts.insert(lang.code().to_string(), LanguageText { alphabet, train, heldout });
        }
        Ok(Self { texts })
    }

    pub fn insert(&mut self, language: &LanguageId, text: LanguageText) {
        self.texts.insert(language.code().to_string(), text);
    }

    pub fn get(&self, language: &LanguageId) -> Result<&LanguageText> {
        self.texts
            .get(language.code())
            .ok_or_else(|| Error::Config(format!("no text loaded for language {language}")))
    }
}

struct Job {
    split: Split,
    language: LanguageId,
    length: usize,
    index: usize,
    chunk: PlaintextChunk,
}

/// Pull `count` chunks of at most `length` characters. When `wrap_to` is
/// set, running off the end restarts there instead of failing.
fn draw(
    chunker: &mut Chunker,
    length: usize,
    count: usize,
    wrap_to: Option<usize>,
) -> std::result::Result<Vec<PlaintextChunk>, usize> {
    chunker.set_max_len(length).expect("lengths are validated positive");
    let mut out = Vec::with_capacity(count);
    let mut since_wrap = 0;
    while out.len() < count {
        match chunker.next() {
            Some(ChunkEvent::Chunk(c)) => {
                out.push(c);
                since_wrap += 1;
            }
            Some(ChunkEvent::Skipped(w)) => crate::textio::warn_skipped(&[w]),
            None => match wrap_to {
                Some(start) if since_wrap > 0 => {
                    chunker.seek(start);
                    since_wrap = 0;
                }
                _ => return Err(out.len()),
            },
        }
    }
    Ok(out)
}

fn make_example(config: &ExperimentConfig, alphabet: &Alphabet, job: Job) -> Result<Example> {
    let parts = [
        seed::label(job.split.as_str()),
        seed::label(job.language.code()),
        job.length as u64,
        job.index as u64,
    ];
    let base = seed::derive(config.seed, &parts);
    let key_seed = seed::derive(base, &[seed::label("key")]);
    let mode = config.spacing_mode;
    let key = random_key(alphabet, mode.key_includes_space(), key_seed);
    let mut instance = encipher(&job.chunk, &key, mode)?;

    let mut noise_seed = None;
    if config.noise.rate > 0.0 {
        let s = seed::derive(base, &[seed::label("noise")]);
        instance = inject_noise(&instance, &config.noise.spec(s)?)?;
        noise_seed = Some(s);
    }
    let mut anagram_seed = None;
    if config.anagram {
        let s = seed::derive(base, &[seed::label("anagram")]);
        instance = anagram(&instance, s)?;
        anagram_seed = Some(s);
    }

    let record = ManifestRecord {
        id: format!("{}-{}-{}-{}", job.split, job.language.code(), job.length, job.index),
        split: job.split,
        max_len: job.length,
        encoding: config.encoding,
        key_seed,
        noise_seed,
        anagram_seed,
        instance,
    };
    Ok(Example {
        source: encode_source(&record.instance, config.encoding)?,
        target: encode_target(&record.instance),
        record,
    })
}

/// Build the requested splits. Output depends only on the config and the
/// corpus text, not on thread scheduling.
pub fn build_splits(config: &ExperimentConfig, corpora: &Corpora, splits: &[Split]) -> Result<DatasetBundle> {
    config.validate()?;
    let mut jobs: BTreeMap<Split, Vec<Job>> = BTreeMap::new();
    let lang_shares = |split: Split| equal_shares(split.count(config), config.languages.len());

    for (li, lang) in config.languages.iter().enumerate() {
        let text = corpora.get(lang)?;
        let mut train_side = Chunker::new(&text.train, config.lengths[0], lang.clone())?;
        let mut heldout = Chunker::new(&text.heldout, config.lengths[0], lang.clone())?;

        // Dev text always comes first so train never overlaps it, even when
        // only the train split is requested.
        let mut draws: Vec<(Split, Vec<Vec<PlaintextChunk>>)> = Vec::new();
        for split in [Split::Dev, Split::Train, Split::Test] {
            let needed = splits.contains(&split) || (split == Split::Dev && splits.contains(&Split::Train));
            if !needed {
                continue;
            }
            let per_length = counts_per_length(lang_shares(split)[li], &config.lengths);
            let wrap = (split == Split::Train && config.reuse_train_text).then(|| train_side.offset());
            let chunker = if split == Split::Test { &mut heldout } else { &mut train_side };
            let mut by_length = Vec::new();
            for (&length, &count) in config.lengths.iter().zip(&per_length) {
                let chunks = draw(chunker, length, count, wrap).map_err(|produced| Error::CorpusExhausted {
                    split: split.to_string(),
                    language: lang.to_string(),
                    length,
                    requested: count,
                    produced,
                })?;
                by_length.push(chunks);
            }
            draws.push((split, by_length));
        }

        for (split, by_length) in draws {
            if !splits.contains(&split) {
                continue;
            }
            let list = jobs.entry(split).or_default();
            for (&length, chunks) in config.lengths.iter().zip(by_length) {
                for (index, chunk) in chunks.into_iter().enumerate() {
                    list.push(Job { split, language: lang.clone(), length, index, chunk });
                }
            }
        }
    }

    let mut bundle = DatasetBundle::default();
    for (split, list) in jobs {
        let examples = list
            .into_par_iter()
            .map(|job| {
                let alphabet = &corpora.get(&job.language)?.alphabet;
                make_example(config, alphabet, job)
            })
            .collect::<Result<Vec<_>>>()?;
        bundle.splits.insert(split, examples);
    }
    Ok(bundle)
}

/// Build all three splits.
pub fn build_dataset(config: &ExperimentConfig, corpora: &Corpora) -> Result<DatasetBundle> {
    build_splits(config, corpora, &Split::ALL)
}
