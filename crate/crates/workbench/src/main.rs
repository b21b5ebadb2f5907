use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use decipher_core::anagram::anagram;
use decipher_core::metrics::{CipherScore, EvalReport};
use decipher_core::{
    chunk, encipher, inject_noise, preprocess, random_key, seed, solve, train_lm, Alphabet, CipherInstance,
    LanguageId, NoiseKind, NoiseSpec, SolverConfig, SpacingMode,
};
use decipher_workbench::config::{Encoding, Sweep};
use decipher_workbench::dataset::{encode_source, Corpora};
use decipher_workbench::experiment::SolverChoice;
use decipher_workbench::textio::{
    load_user_cipher, read_jsonl, read_lines, read_text, tokens_to_chars, warn_skipped, write_jsonl,
    write_lines, write_text, ChunkRecord,
};
use decipher_workbench::{build_dataset, read_lm, run_experiment, write_lm, ExperimentConfig};

#[derive(Parser)]
#[command(name = "decipher", version, about = "Substitution-cipher datasets, solver and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct LangArgs {
    /// Language code (en, fr, de, ...).
    #[arg(long, default_value = "en")]
    lang: String,
    /// Alphabet letters, overriding the default a-z.
    #[arg(long)]
    letters: Option<String>,
}

impl LangArgs {
    fn alphabet(&self) -> Result<Alphabet> {
        let lang = LanguageId::from(self.lang.as_str());
        Ok(match &self.letters {
            Some(l) => Alphabet::new(l.chars().collect(), lang)?,
            None => Alphabet::latin(lang),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Ser,
    Ter,
    Wordacc,
}

#[derive(Clone, Copy, ValueEnum)]
enum LineFormat {
    /// One token per character, `_` for the space.
    Tokens,
    /// Plain text.
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Classical,
    Neural,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize raw text to the alphabet.
    Preprocess {
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Cut word-aligned chunks from preprocessed text into a JSON-lines manifest.
    Chunk {
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Generate enciphered chunks of a raw corpus as JSON-lines instances.
    Encipher {
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "plain_space")]
        spacing: SpacingMode,
        #[arg(long, default_value_t = 0.0)]
        noise_rate: f64,
        #[arg(long, default_value = "sid")]
        noise_kinds: String,
        #[arg(long)]
        anagram: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Encode the ciphertexts of a JSON-lines instance file, one line each.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "frequency")]
        encoding: EncodingArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Train a character n-gram model on a raw corpus.
    TrainLm {
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Decipher with beam search. The cipher file is either JSON-lines
    /// instances (`.jsonl`) or whitespace-separated symbols.
    Solve {
        #[arg(long)]
        cipher: PathBuf,
        #[arg(long)]
        lm: PathBuf,
        #[arg(long, default_value_t = 1000)]
        beam: usize,
        #[arg(long, default_value_t = 0.0)]
        freq_weight: f64,
        #[arg(long)]
        lm_order: Option<usize>,
        /// Let a cipher symbol decode to the space (enciphered-space
        /// ciphers). Instance files set this from their spacing mode.
        #[arg(long)]
        space_is_symbol: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Score hypotheses against references, line by line.
    Evaluate {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value = "ser")]
        metric: MetricArg,
        #[arg(long, default_value = "tokens")]
        format: LineFormat,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write train/dev/test `.src`, `.tgt` and manifest files.
    BuildDataset {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode and score the test ciphers of every sweep row.
    RunExperiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "classical")]
        solver: SolverArg,
        /// Directory of neural hypotheses, `<row>/test.hyp`.
        #[arg(long)]
        hyp_dir: Option<PathBuf>,
        /// Sweep this axis over its standard rows, overriding the config.
        #[arg(long)]
        axis: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Frequency,
    Raw,
    SortedBag,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Frequency => Encoding::Frequency,
            EncodingArg::Raw => Encoding::Raw,
            EncodingArg::SortedBag => Encoding::SortedBag,
        }
    }
}

fn emit_lines(output: Option<&Path>, lines: &[String]) -> Result<()> {
    match output {
        Some(p) => write_lines(p, lines)?,
        None => {
            let mut out = std::io::stdout().lock();
            for l in lines {
                match writeln!(out, "{l}") {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
                    r => r?,
                }
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Preprocess { lang, input, output } => {
            let text = preprocess(&read_text(&input)?, &lang.alphabet()?)?;
            write_text(&output, &text)?;
        }
        Command::Chunk { lang, input, length, count, output } => {
            let alphabet = lang.alphabet()?;
            let out = chunk(read_text(&input)?.trim_end_matches('\n'), length, count, alphabet.language().clone())?;
            warn_skipped(&out.warnings);
            let records: Vec<ChunkRecord> = out.chunks.iter().map(ChunkRecord::from).collect();
            write_jsonl(&output, &records)?;
        }
        Command::Encipher { lang, corpus, length, count, spacing, noise_rate, noise_kinds, anagram: shuffle, seed: base, output } => {
            let alphabet = lang.alphabet()?;
            let text = preprocess(&read_text(&corpus)?, &alphabet)?;
            let chunks = chunk(&text, length, count, alphabet.language().clone())?;
            warn_skipped(&chunks.warnings);
            let kinds = NoiseKind::parse_set(&noise_kinds)?;
            let mut instances = Vec::with_capacity(count);
            for (i, c) in chunks.chunks.iter().enumerate() {
                let key_seed = seed::derive(base, &[seed::label("key"), i as u64]);
                let mut inst = encipher(c, &random_key(&alphabet, spacing.key_includes_space(), key_seed), spacing)?;
                if noise_rate > 0.0 {
                    let s = seed::derive(base, &[seed::label("noise"), i as u64]);
                    inst = inject_noise(&inst, &NoiseSpec::new(noise_rate, kinds.clone(), s)?)?;
                }
                if shuffle {
                    inst = anagram(&inst, seed::derive(base, &[seed::label("anagram"), i as u64]))?;
                }
                instances.push(inst);
            }
            match output {
                Some(p) => write_jsonl(&p, &instances)?,
                None => {
                    let lines = instances.iter().map(serde_json::to_string).collect::<serde_json::Result<Vec<_>>>()?;
                    emit_lines(None, &lines)?;
                }
            }
        }
        Command::Encode { input, encoding, output } => {
            let instances: Vec<CipherInstance> = read_jsonl(&input)?;
            let lines = instances
                .iter()
                .map(|i| encode_source(i, encoding.into()))
                .collect::<decipher_workbench::Result<Vec<_>>>()?;
            emit_lines(output.as_deref(), &lines)?;
        }
        Command::TrainLm { lang, corpus, order, output } => {
            let alphabet = lang.alphabet()?;
            let text = preprocess(&read_text(&corpus)?, &alphabet)?;
            let lm = train_lm(&text, &alphabet, order)?;
            write_lm(&output, &lm)?;
            eprintln!("trained order-{order} model on {} characters", text.chars().count());
        }
        Command::Solve { cipher, lm, beam, freq_weight, lm_order, space_is_symbol, output } => {
            let lm = read_lm(&lm)?;
            let config = SolverConfig { beam_width: beam, lm_order, freq_match_weight: freq_weight, space_is_symbol };
            let ciphers: Vec<(Vec<char>, bool)> = if cipher.extension().is_some_and(|e| e == "jsonl") {
                read_jsonl::<CipherInstance>(&cipher)?
                    .into_iter()
                    .map(|i| (i.ciphertext, i.spacing_mode == SpacingMode::EncipheredSpace))
                    .collect()
            } else {
                vec![(load_user_cipher(&cipher)?, space_is_symbol)]
            };
            let mut lines = Vec::with_capacity(ciphers.len());
            for (i, (c, spaced)) in ciphers.iter().enumerate() {
                let config = SolverConfig { space_is_symbol: *spaced, ..config.clone() };
                let sol = solve(c, &lm, &config).with_context(|| format!("cipher {}", i + 1))?;
                eprintln!("cipher {}: score {:.3}", i + 1, sol.score);
                lines.push(sol.plaintext);
            }
            emit_lines(output.as_deref(), &lines)?;
        }
        Command::Evaluate { hyp, reference, metric, format, report } => {
            let parse = |line: &str| -> Result<String> {
                Ok(match format {
                    LineFormat::Tokens => tokens_to_chars(line)?.into_iter().collect(),
                    LineFormat::Text => line.to_string(),
                })
            };
            let hyps = read_lines(&hyp)?;
            let refs = read_lines(&reference)?;
            if refs.is_empty() {
                bail!("{} has no references", reference.display());
            }
            let mut scores = Vec::with_capacity(refs.len());
            for (i, r) in refs.iter().enumerate() {
                let id = (i + 1).to_string();
                let score = match hyps.get(i) {
                    Some(h) => CipherScore::compute(&id, &parse(h)?, &parse(r)?)
                        .unwrap_or_else(|e| CipherScore::failed(&id, e.to_string())),
                    None => CipherScore::failed(&id, "missing hypothesis line"),
                };
                scores.push(score);
            }
            let eval = EvalReport::from_scores(scores);
            let agg = &eval.aggregate;
            let (name, value) = match metric {
                MetricArg::Ser => ("SER", agg.ser),
                MetricArg::Ter => ("TER", agg.ter),
                MetricArg::Wordacc => ("word accuracy", agg.word_acc),
            };
            match value {
                Some(v) => println!("{name}: {:.4} over {} lines ({} failed)", v, agg.scored, agg.failed),
                None => println!("{name}: undefined ({} scored, {} failed)", agg.scored, agg.failed),
            }
            if let Some(p) = report {
                write_text(&p, &serde_json::to_string_pretty(&eval)?)?;
            }
        }
        Command::BuildDataset { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let corpora = Corpora::load(&cfg)?;
            let bundle = build_dataset(&cfg, &corpora)?;
            bundle.write(&out)?;
            write_text(&out.join("config.json"), &serde_json::to_string_pretty(&cfg)?)?;
            for (split, ex) in &bundle.splits {
                eprintln!("{split}: {} examples", ex.len());
            }
        }
        Command::RunExperiment { config, out, solver, hyp_dir, axis } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(axis) = axis {
                cfg.sweep = Some(Sweep::standard(&axis).with_context(|| format!("unknown axis {axis:?}"))?);
                cfg.validate()?;
            }
            let choice = match solver {
                SolverArg::Classical => SolverChoice::Classical,
                SolverArg::Neural => SolverChoice::Neural { hyp_dir: hyp_dir.context("--hyp-dir is required for the neural solver")? },
            };
            let corpora = Corpora::load(&cfg)?;
            let result = run_experiment(&cfg, &corpora, &choice, None, Some(&out))?;
            print!("{}", result.table());
        }
    }
    Ok(())
}
