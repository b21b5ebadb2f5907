use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use decipher_core::{Alphabet, LanguageId, NoiseKind, NoiseSpec, SolverConfig, SpacingMode};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textio::read_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    Frequency,
    /// Cipher symbols as they are. Only meaningful as a control: models
    /// trained on it see a different key in every example.
    Raw,
    SortedBag,
}

impl Encoding {
    pub fn as_str(self) -> &'static str {
        match self {
            Encoding::Frequency => "frequency",
            Encoding::Raw => "raw",
            Encoding::SortedBag => "sorted_bag",
        }
    }
}

/// Where to read one language's text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSource {
    /// Training and dev text.
    pub train: PathBuf,
    /// Held-out document the test ciphers are cut from.
    pub heldout: PathBuf,
    /// Override the language's default `a`-`z` alphabet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letters: Option<String>,
}

impl CorpusSource {
    pub fn alphabet(&self, language: &LanguageId) -> Result<Alphabet> {
        Ok(match &self.letters {
            Some(l) => Alphabet::new(l.chars().collect(), language.clone())?,
            None => Alphabet::latin(language.clone()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub rate: f64,
    #[serde(default = "NoiseConfig::default_kinds")]
    pub kinds: String,
}

impl NoiseConfig {
    fn default_kinds() -> String {
        "sid".into()
    }

    pub fn kinds(&self) -> Result<Vec<NoiseKind>> {
        Ok(NoiseKind::parse_set(&self.kinds)?)
    }

    pub fn spec(&self, seed: u64) -> Result<NoiseSpec> {
        Ok(NoiseSpec::new(self.rate, self.kinds()?, seed)?)
    }

    pub fn has_indels(&self) -> bool {
        self.rate > 0.0 && self.kinds.chars().any(|c| c == 'i' || c == 'd')
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { rate: 0.0, kinds: Self::default_kinds() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmConfig {
    #[serde(default = "LmConfig::default_order")]
    pub order: usize,
    /// Pre-trained model per language code; others are trained on the fly.
    #[serde(default)]
    pub paths: BTreeMap<String, PathBuf>,
}

impl LmConfig {
    fn default_order() -> usize {
        6
    }
}

impl Default for LmConfig {
    fn default() -> Self {
        Self { order: Self::default_order(), paths: BTreeMap::new() }
    }
}

/// The experiment axis a run sweeps over; each value becomes a table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum Sweep {
    Length(Vec<usize>),
    Spacing(Vec<SpacingMode>),
    /// Number of languages, taking the configured languages in order.
    Languages(Vec<usize>),
    /// Noise rates as fractions.
    Noise(Vec<f64>),
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::Length(_) => "length",
            Sweep::Spacing(_) => "spacing",
            Sweep::Languages(_) => "languages",
            Sweep::Noise(_) => "noise",
        }
    }

    /// The usual rows for an axis.
    pub fn standard(axis: &str) -> Option<Sweep> {
        Some(match axis {
            "length" => Sweep::Length(vec![16, 32, 64, 128, 256]),
            "spacing" => Sweep::Spacing(SpacingMode::ALL.to_vec()),
            "languages" => Sweep::Languages(vec![1, 2, 3]),
            "noise" => Sweep::Noise(vec![0.05, 0.10, 0.15, 0.20, 0.25]),
            _ => return None,
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::Length(v) | Sweep::Languages(v) => v.len(),
            Sweep::Spacing(v) => v.len(),
            Sweep::Noise(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row label and the configuration for row `i`.
    pub fn row(&self, base: &ExperimentConfig, i: usize) -> (String, ExperimentConfig) {
        let mut cfg = base.clone();
        cfg.sweep = None;
        let label = match self {
            Sweep::Length(v) => {
                cfg.lengths = vec![v[i]];
                v[i].to_string()
            }
            Sweep::Spacing(v) => {
                cfg.spacing_mode = v[i];
                v[i].label().to_string()
            }
            Sweep::Languages(v) => {
                cfg.languages.truncate(v[i]);
                v[i].to_string()
            }
            Sweep::Noise(v) => {
                cfg.noise.rate = v[i];
                format!("{}", (v[i] * 100.0).round())
            }
        };
        (label, cfg)
    }
}

fn default_lengths() -> Vec<usize> {
    vec![256]
}

fn default_spacing() -> SpacingMode {
    SpacingMode::PlainSpace
}

fn default_train() -> usize {
    200_000
}

fn default_dev() -> usize {
    1_000
}

fn default_test() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub languages: Vec<LanguageId>,
    pub corpora: BTreeMap<String, CorpusSource>,
    #[serde(default = "default_lengths")]
    pub lengths: Vec<usize>,
    #[serde(default = "default_spacing")]
    pub spacing_mode: SpacingMode,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub anagram: bool,
    #[serde(default)]
    pub encoding: Encoding,
    #[serde(default = "default_train")]
    pub train_count: usize,
    #[serde(default = "default_dev")]
    pub dev_count: usize,
    #[serde(default = "default_test")]
    pub test_count: usize,
    /// Let the training split cycle through its text again, with fresh
    /// keys, once it runs out.
    #[serde(default)]
    pub reuse_train_text: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub lm: LmConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl ExperimentConfig {
    /// Parse TOML or JSON (by extension) and resolve corpus and model paths
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut cfg: ExperimentConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)?
        };
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        for src in self.corpora.values_mut() {
            fix(&mut src.train);
            fix(&mut src.heldout);
        }
        for p in self.lm.paths.values_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.languages.is_empty() {
            return fail("no languages configured".into());
        }
        for lang in &self.languages {
            if !self.corpora.contains_key(lang.code()) {
                return fail(format!("no corpus configured for language {lang}"));
            }
        }
        if self.lengths.is_empty() || self.lengths.contains(&0) {
            return fail("lengths must be a non-empty list of positive integers".into());
        }
        if self.train_count == 0 || self.dev_count == 0 || self.test_count == 0 {
            return fail("train_count, dev_count and test_count must be at least 1".into());
        }
        if self.solver.beam_width == 0 {
            return fail("solver.beam_width must be at least 1".into());
        }
        if self.solver.freq_match_weight < 0.0 {
            return fail("solver.freq_match_weight must be non-negative".into());
        }
        self.noise.spec(0)?;
        self.check_combination(self.spacing_mode, self.noise.rate)?;
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return fail("sweep has no values".into());
            }
            for i in 0..sweep.len() {
                let (_, row) = sweep.row(self, i);
                if row.languages.is_empty() || row.lengths.contains(&0) {
                    return fail(format!("sweep value {i} selects no languages or a zero length"));
                }
                row.noise.spec(0)?;
                row.check_combination(row.spacing_mode, row.noise.rate)?;
            }
        }
        Ok(())
    }

    fn check_combination(&self, spacing: SpacingMode, noise_rate: f64) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.into()));
        if self.anagram && spacing != SpacingMode::PlainSpace {
            return fail("anagramming needs spacing_mode = plain_space");
        }
        if self.anagram && noise_rate > 0.0 {
            return fail("anagramming and noise cannot be combined");
        }
        if (self.encoding == Encoding::SortedBag) != self.anagram {
            return fail("sorted_bag encoding goes with anagram = true, and only with it");
        }
        if self.encoding == Encoding::Raw && noise_rate > 0.0 {
            return fail("raw encoding is a noiseless control; set noise.rate = 0");
        }
        Ok(())
    }

    pub fn alphabet(&self, language: &LanguageId) -> Result<Alphabet> {
        self.corpora
            .get(language.code())
            .ok_or_else(|| Error::Config(format!("no corpus configured for language {language}")))?
            .alphabet(language)
    }
}
