//! Experiment runs: build the test ciphers for every row of a sweep, decode
//! them with the classical solver or read a neural system's hypotheses, and
//! score the result.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use decipher_core::metrics::{CipherScore, EvalReport};
use decipher_core::{solve, train_lm, CharNGramLM, SolverConfig, SpacingMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::dataset::{build_splits, write_split, Corpora, Example, Split};
use crate::error::{Error, Result};
use crate::lmfile::read_lm;
use crate::textio::{chars_to_tokens, read_lines, tokens_to_chars, write_lines, write_text};

/// Padding for hypotheses shorter than the length contract demands. It is
/// never a plaintext letter, so padded positions always count as errors.
pub const PAD: char = '\u{FFFD}';

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverChoice {
    Classical,
    /// Hypothesis files from the neural system: `<dir>/<row>/test.hyp`,
    /// line-aligned with `test.src`.
    Neural { hyp_dir: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "SER")]
    Ser,
    #[serde(rename = "TER")]
    Ter,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Ser => "SER",
            Metric::Ter => "TER",
        }
    }

    /// SER where hypothesis and reference align position by position, TER
    /// where spaces are generated or noise shifts positions.
    pub fn for_config(config: &ExperimentConfig) -> Metric {
        if config.spacing_mode == SpacingMode::NoSpaceGenerate || config.noise.has_indels() {
            Metric::Ter
        } else {
            Metric::Ser
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowResult {
    pub label: String,
    /// Directory name of the row's archived outputs.
    pub dir: String,
    pub metric: Metric,
    pub report: EvalReport,
}

impl RowResult {
    pub fn value(&self) -> Option<f64> {
        match self.metric {
            Metric::Ser => self.report.aggregate.ser,
            Metric::Ter => self.report.aggregate.ter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub axis: String,
    pub solver: String,
    pub test_count: usize,
    pub rows: Vec<RowResult>,
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{:.2}", 100.0 * x))
}

impl ExperimentResult {
    /// Aligned text table, one row per sweep value, metrics in percent.
    pub fn table(&self) -> String {
        let header = [self.axis.clone(), "metric".into(), "value %".into(), "SER %".into(), "TER %".into(), "word acc %".into(), "scored".into(), "failed".into()];
        let mut rows = vec![header.to_vec()];
        for r in &self.rows {
            let a = &r.report.aggregate;
            rows.push(vec![
                r.label.clone(),
                r.metric.name().into(),
                pct(r.value()),
                pct(a.ser),
                pct(a.ter),
                pct(a.word_acc),
                a.scored.to_string(),
                a.failed.to_string(),
            ]);
        }
        let widths: Vec<usize> =
            (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "# solver: {}; {} test ciphers per row", self.solver, self.test_count);
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
            if i == 0 {
                let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            }
        }
        out
    }
}

/// Apply the output-length contract: length-preserving regimes must match
/// the source length exactly, generate-spaces output is capped at the chunk
/// length. Long output is cut, short output is padded with [`PAD`].
pub fn enforce_length(hyp: &[char], example: &Example) -> Vec<char> {
    let record = &example.record;
    let mut out = hyp.to_vec();
    if record.instance.spacing_mode == SpacingMode::NoSpaceGenerate {
        out.truncate(record.max_len);
    } else {
        out.resize(record.instance.ciphertext.len(), PAD);
    }
    out
}

/// Language models for the classical solver, keyed by language code.
pub struct LmCache {
    models: BTreeMap<String, CharNGramLM>,
}

impl LmCache {
    pub fn prepare(config: &ExperimentConfig, corpora: &Corpora) -> Result<Self> {
        let mut models = BTreeMap::new();
        for lang in &config.languages {
            let code = lang.code().to_string();
            if models.contains_key(&code) {
                continue;
            }
            let lm = match config.lm.paths.get(&code) {
                Some(path) => read_lm(path)?,
                None => {
                    let text = corpora.get(lang)?;
                    train_lm(&text.train, &text.alphabet, config.lm.order)?
                }
            };
            models.insert(code, lm);
        }
        Ok(Self { models })
    }

    pub fn from_models(models: impl IntoIterator<Item = (String, CharNGramLM)>) -> Self {
        Self { models: models.into_iter().collect() }
    }

    pub fn get(&self, code: &str) -> Option<&CharNGramLM> {
        self.models.get(code)
    }
}

fn row_dir(axis: &str, label: &str) -> String {
    let slug: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    format!("{axis}-{}", slug.trim_matches('-'))
}

fn classical_hypotheses(examples: &[Example], config: &ExperimentConfig, lms: &LmCache) -> Vec<Result<Vec<char>, String>> {
    examples
        .par_iter()
        .map(|ex| {
            let inst = &ex.record.instance;
            let code = inst.plaintext.language.code();
            let lm = lms.get(code).ok_or_else(|| format!("no language model for {code}"))?;
            let solver = SolverConfig {
                space_is_symbol: inst.spacing_mode == SpacingMode::EncipheredSpace,
                ..config.solver.clone()
            };
            let sol = solve(&inst.ciphertext, lm, &solver).map_err(|e| e.to_string())?;
            Ok(sol.plaintext.chars().collect())
        })
        .collect()
}

fn neural_hypotheses(examples: &[Example], path: &Path) -> Result<Vec<Result<Vec<char>, String>>> {
    let lines = read_lines(path)?;
    Ok((0..examples.len())
        .map(|i| match lines.get(i) {
            Some(line) => tokens_to_chars(line).map_err(|e| e.to_string()),
            None => Err(format!("{} has no line {}", path.display(), i + 1)),
        })
        .collect())
}

fn score_row(examples: &[Example], hyps: Vec<Result<Vec<char>, String>>) -> (EvalReport, Vec<String>) {
    let mut hyp_lines = Vec::with_capacity(examples.len());
    let scores: Vec<CipherScore> = examples
        .iter()
        .zip(hyps)
        .map(|(ex, hyp)| match hyp {
            Ok(h) => {
                let h = enforce_length(&h, ex);
                hyp_lines.push(chars_to_tokens(h.iter().copied()));
                let text: String = h.into_iter().collect();
                CipherScore::compute(&ex.record.id, &text, &ex.record.instance.plaintext.text)
                    .unwrap_or_else(|e| CipherScore::failed(&ex.record.id, e.to_string()))
            }
            Err(e) => {
                hyp_lines.push(String::new());
                CipherScore::failed(&ex.record.id, e)
            }
        })
        .collect();
    (EvalReport::from_scores(scores), hyp_lines)
}

/// Run every row of the config's sweep (or the config itself as a single
/// row). With `out_dir`, each row's test set, hypotheses and scores are
/// archived under `<out_dir>/<row>/`, and `results.json` plus
/// `results.txt` are written at the top.
pub fn run_experiment(
    config: &ExperimentConfig,
    corpora: &Corpora,
    solver: &SolverChoice,
    lms: Option<&LmCache>,
    out_dir: Option<&Path>,
) -> Result<ExperimentResult> {
    config.validate()?;
    let rows: Vec<(String, ExperimentConfig)> = match &config.sweep {
        Some(sweep) => (0..sweep.len()).map(|i| sweep.row(config, i)).collect(),
        None => vec![("all".to_string(), config.clone())],
    };
    let axis = config.sweep.as_ref().map_or("condition", |s| s.name()).to_string();

    let owned_lms;
    let lms = match (solver, lms) {
        (SolverChoice::Classical, Some(l)) => Some(l),
        (SolverChoice::Classical, None) => {
            owned_lms = LmCache::prepare(config, corpora)?;
            Some(&owned_lms)
        }
        (SolverChoice::Neural { .. }, _) => None,
    };

    let mut results = Vec::with_capacity(rows.len());
    for (label, row_cfg) in rows {
        let dir = row_dir(&axis, &label);
        let bundle = build_splits(&row_cfg, corpora, &[Split::Test])?;
        let examples = bundle.get(Split::Test);
        if examples.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        let hyps = match solver {
            SolverChoice::Classical => classical_hypotheses(examples, &row_cfg, lms.expect("classical solver has models")),
            SolverChoice::Neural { hyp_dir } => neural_hypotheses(examples, &hyp_dir.join(&dir).join("test.hyp"))?,
        };
        let (report, hyp_lines) = score_row(examples, hyps);
        if let Some(out) = out_dir {
            let row_out = out.join(&dir);
            write_split(&row_out, Split::Test, examples)?;
            write_lines(&row_out.join("test.out"), &hyp_lines)?;
            write_text(&row_out.join("scores.json"), &serde_json::to_string_pretty(&report)?)?;
        }
        results.push(RowResult { label, dir, metric: Metric::for_config(&row_cfg), report });
    }

    let result = ExperimentResult {
        axis,
        solver: match solver {
            SolverChoice::Classical => format!(
                "classical beam {} freq-weight {} lm order {}",
                config.solver.beam_width, config.solver.freq_match_weight, config.lm.order
            ),
            SolverChoice::Neural { .. } => "neural".into(),
        },
        test_count: config.test_count,
        rows: results,
    };
    if let Some(out) = out_dir {
        write_text(&out.join("results.json"), &serde_json::to_string_pretty(&result)?)?;
        write_text(&out.join("results.txt"), &result.table())?;
    }
    Ok(result)
}
