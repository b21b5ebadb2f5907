//! ARPA-style text serialization of [`CharNGramLM`].
//!
//! ```text
//! #decipher-lm 1
//! order 6
//! language en
//! letters abcdefghijklmnopqrstuvwxyz
//! root-backoff -0.0123
//! letter-counts 812 144 ...
//!
//! \data\
//! ngram 1=28
//! ...
//!
//! \1-grams:
//! -3.12<TAB>a<TAB>-0.51
//! ...
//! \end\
//! ```
//!
//! Unlike ARPA files the logarithms are natural, and symbols inside an
//! n-gram are separated by single spaces with `<sp>` for the word space and
//! `<b>` for the boundary symbol. Floats are written in shortest round-trip
//! form so a reloaded model scores identically.

use std::io::Write;
use std::path::Path;

use decipher_core::lm::{LmEntry, SymbolId};
use decipher_core::{Alphabet, CharNGramLM, LanguageId};

use crate::error::{Error, Result};
use crate::textio::{open_write, read_lines};

pub const MAGIC: &str = "#decipher-lm";
pub const VERSION: u32 = 1;

const SPACE_TOKEN: &str = "<sp>";
const BOUNDARY_TOKEN: &str = "<b>";

fn symbol_token(lm: &CharNGramLM, id: SymbolId) -> String {
    if id == lm.space_id() {
        SPACE_TOKEN.to_string()
    } else if id == lm.boundary_id() {
        BOUNDARY_TOKEN.to_string()
    } else {
        lm.alphabet().letters()[id as usize].to_string()
    }
}

pub fn write_lm(path: &Path, lm: &CharNGramLM) -> Result<()> {
    let entries = lm.entries();
    let mut per_order = vec![0usize; lm.order()];
    for e in &entries {
        per_order[e.symbols.len() - 1] += 1;
    }
    let mut w = open_write(path)?;
    let res: std::io::Result<()> = (|| {
        writeln!(w, "{MAGIC} {VERSION}")?;
        writeln!(w, "order {}", lm.order())?;
        writeln!(w, "language {}", lm.alphabet().language())?;
        writeln!(w, "letters {}", lm.alphabet().letters().iter().collect::<String>())?;
        writeln!(w, "root-backoff {:?}", lm.root_log_backoff())?;
        let counts: Vec<String> = lm.letter_counts().iter().map(u64::to_string).collect();
        writeln!(w, "letter-counts {}", counts.join(" "))?;
        writeln!(w)?;
        writeln!(w, "\\data\\")?;
        for (k, n) in per_order.iter().enumerate() {
            writeln!(w, "ngram {}={}", k + 1, n)?;
        }
        let mut current = 0;
        for e in &entries {
            if e.symbols.len() != current {
                current = e.symbols.len();
                writeln!(w)?;
                writeln!(w, "\\{current}-grams:")?;
            }
            let syms: Vec<String> = e.symbols.iter().map(|&s| symbol_token(lm, s)).collect();
            writeln!(w, "{:?}\t{}\t{:?}", e.log_prob, syms.join(" "), e.log_backoff)?;
        }
        writeln!(w)?;
        writeln!(w, "\\end\\")?;
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

fn bad(path: &Path, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("{}:{}: {}", path.display(), line, msg))
}

fn header_value<'a>(lines: &'a [String], idx: &mut usize, key: &str, path: &Path) -> Result<&'a str> {
    let line = lines.get(*idx).ok_or_else(|| bad(path, *idx + 1, format!("missing `{key}` line")))?;
    *idx += 1;
    let rest = line
        .strip_prefix(key)
        .filter(|r| r.is_empty() || r.starts_with(' '))
        .ok_or_else(|| bad(path, *idx, format!("expected `{key}`")))?;
    Ok(rest.trim_start())
}

fn parse_f64(s: &str, path: &Path, line: usize) -> Result<f64> {
    s.parse().map_err(|_| bad(path, line, format!("bad number {s:?}")))
}

pub fn read_lm(path: &Path) -> Result<CharNGramLM> {
    let lines = read_lines(path)?;
    let mut i = 0;
    let version = header_value(&lines, &mut i, MAGIC, path)?;
    if version != VERSION.to_string() {
        return Err(bad(path, 1, format!("unsupported version {version:?}")));
    }
    let order: usize = header_value(&lines, &mut i, "order", path)?
        .parse()
        .map_err(|_| bad(path, i, "bad order"))?;
    let language = LanguageId::from(header_value(&lines, &mut i, "language", path)?);
    let letters: Vec<char> = header_value(&lines, &mut i, "letters", path)?.chars().collect();
    let alphabet = Alphabet::new(letters, language)?;
    let root = parse_f64(header_value(&lines, &mut i, "root-backoff", path)?, path, i)?;
    let letter_counts = header_value(&lines, &mut i, "letter-counts", path)?
        .split_whitespace()
        .map(|s| s.parse::<u64>().map_err(|_| bad(path, i, format!("bad count {s:?}"))))
        .collect::<Result<Vec<_>>>()?;

    let space = alphabet.len() as SymbolId;
    let boundary = space + 1;
    let symbol = |tok: &str, line: usize| -> Result<SymbolId> {
        match tok {
            SPACE_TOKEN => Ok(space),
            BOUNDARY_TOKEN => Ok(boundary),
            _ => {
                let mut it = tok.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => alphabet
                        .index_of(c)
                        .map(|x| x as SymbolId)
                        .ok_or_else(|| bad(path, line, format!("symbol {c:?} not in the alphabet"))),
                    _ => Err(bad(path, line, format!("bad symbol token {tok:?}"))),
                }
            }
        }
    };

    let mut declared = vec![0usize; order];
    let mut entries = Vec::new();
    let mut section = 0usize;
    let mut ended = false;
    for (n, line) in lines.iter().enumerate().skip(i) {
        let lineno = n + 1;
        if line.is_empty() || line == "\\data\\" {
            continue;
        }
        if line == "\\end\\" {
            ended = true;
            break;
        }
        if let Some(decl) = line.strip_prefix("ngram ") {
            let (k, c) = decl.split_once('=').ok_or_else(|| bad(path, lineno, "bad ngram count line"))?;
            let k: usize = k.parse().map_err(|_| bad(path, lineno, "bad ngram order"))?;
            if k == 0 || k > order {
                return Err(bad(path, lineno, "ngram order outside the model order"));
            }
            declared[k - 1] = c.parse().map_err(|_| bad(path, lineno, "bad ngram count"))?;
            continue;
        }
        if let Some(k) = line.strip_prefix('\\').and_then(|s| s.strip_suffix("-grams:")) {
            section = k.parse().map_err(|_| bad(path, lineno, "bad section header"))?;
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(lp), Some(syms), Some(bo), None) = (fields.next(), fields.next(), fields.next(), fields.next()) else {
            return Err(bad(path, lineno, "expected three tab-separated fields"));
        };
        let symbols = syms.split(' ').map(|t| symbol(t, lineno)).collect::<Result<Vec<_>>>()?;
        if symbols.len() != section {
            return Err(bad(path, lineno, format!("{}-gram in the {section}-gram section", symbols.len())));
        }
        entries.push(LmEntry {
            symbols,
            log_prob: parse_f64(lp, path, lineno)?,
            log_backoff: parse_f64(bo, path, lineno)?,
        });
    }
    if !ended {
        return Err(bad(path, lines.len(), "missing \\end\\ (truncated file?)"));
    }
    let mut found = vec![0usize; order];
    for e in &entries {
        found[e.symbols.len() - 1] += 1;
    }
    if found != declared {
        return Err(bad(path, 0, format!("n-gram counts {found:?} differ from the declared {declared:?}")));
    }
    Ok(CharNGramLM::from_parts(order, alphabet, root, letter_counts, entries)?)
}
