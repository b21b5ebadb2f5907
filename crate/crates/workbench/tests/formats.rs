use decipher_core::{train_lm, Alphabet, LanguageId, PlaintextChunk};
use decipher_workbench::config::ExperimentConfig;
use decipher_workbench::textio::{
    chars_to_tokens, read_jsonl, read_text, tokens_to_chars, write_jsonl, write_text, ChunkRecord,
};
use decipher_workbench::{load_user_cipher, read_lm, write_lm, Error};

const CORPUS: &str = "the cat sat on the mat and the dog sat on the log while a bird sang";

#[test]
fn language_model_survives_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lm = train_lm(CORPUS, &Alphabet::english(), 4).unwrap();
    for name in ["model.lm", "model.lm.gz"] {
        let path = dir.path().join(name);
        write_lm(&path, &lm).unwrap();
        let back = read_lm(&path).unwrap();
        assert_eq!(back.order(), lm.order());
        assert_eq!(back.letter_counts(), lm.letter_counts());
        assert_eq!(back.entries(), lm.entries());
        for ctx in ["", "t", "th", "the", " sa", "zz"] {
            let ctx: Vec<char> = ctx.chars().collect();
            for next in ['a', 'e', ' ', 'q'] {
                assert_eq!(back.log_prob(&ctx, next).unwrap(), lm.log_prob(&ctx, next).unwrap());
            }
        }
    }
}

#[test]
fn truncated_language_model_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.lm");
    write_lm(&path, &train_lm(CORPUS, &Alphabet::english(), 3).unwrap()).unwrap();
    let text = read_text(&path).unwrap();
    let cut: String = text.lines().take(text.lines().count() / 2).collect::<Vec<_>>().join("\n");
    write_text(&path, &cut).unwrap();
    assert!(read_lm(&path).is_err());
}

#[test]
fn chunk_records_round_trip_through_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chunks.jsonl.gz");
    let chunks = vec![
        PlaintextChunk::new("the cat", LanguageId::English, 0),
        PlaintextChunk::new("sat on", LanguageId::English, 8),
    ];
    let records: Vec<ChunkRecord> = chunks.iter().map(ChunkRecord::from).collect();
    write_jsonl(&path, &records).unwrap();
    let back: Vec<ChunkRecord> = read_jsonl(&path).unwrap();
    assert_eq!(back, records);
    let restored: Vec<PlaintextChunk> = back.into_iter().map(PlaintextChunk::from).collect();
    assert_eq!(restored, chunks);
}

#[test]
fn tokens_mark_spaces_with_underscores() {
    let line = chars_to_tokens("ab c".chars());
    assert_eq!(line, "a b _ c");
    assert_eq!(tokens_to_chars(&line).unwrap(), vec!['a', 'b', ' ', 'c']);
    assert!(tokens_to_chars("ab c").is_err());
}

#[test]
fn user_cipher_accepts_arbitrary_glyphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cipher.txt");
    write_text(&path, "α β α\n").unwrap();
    let symbols = load_user_cipher(&path).unwrap();
    assert_eq!(symbols, vec!['α', 'β', 'α']);

    write_text(&path, "α β _ γ").unwrap();
    assert_eq!(load_user_cipher(&path).unwrap(), vec!['α', 'β', ' ', 'γ']);

    write_text(&path, "  \n").unwrap();
    assert!(matches!(load_user_cipher(&path), Err(Error::EmptyInput(_))));
}

fn config(extra: &str) -> Result<ExperimentConfig, Error> {
    let text = format!(
        "languages = [\"en\"]\n{extra}\n[corpora.en]\ntrain = \"a.txt\"\nheldout = \"b.txt\"\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    write_text(&path, &text).unwrap();
    ExperimentConfig::load(&path)
}

#[test]
fn config_defaults_and_relative_paths() {
    let cfg = config("").unwrap();
    assert_eq!(cfg.lengths, vec![256]);
    assert_eq!(cfg.test_count, 50);
    assert_eq!(cfg.lm.order, 6);
    assert!(cfg.corpora["en"].train.is_absolute());
}

#[test]
fn config_rejects_impossible_combinations() {
    let bad = [
        "anagram = true",
        "encoding = \"sorted_bag\"",
        "anagram = true\nencoding = \"sorted_bag\"\nspacing_mode = \"no_space\"",
        "anagram = true\nencoding = \"sorted_bag\"\n[noise]\nrate = 0.1",
        "encoding = \"raw\"\n[noise]\nrate = 0.1",
        "lengths = []",
        "lengths = [0]",
        "test_count = 0",
        "[noise]\nrate = 1.5",
        "[noise]\nrate = 0.1\nkinds = \"x\"",
    ];
    for extra in bad {
        assert!(config(extra).is_err(), "accepted: {extra}");
    }
    assert!(config("anagram = true\nencoding = \"sorted_bag\"").is_ok());
    assert!(config("encoding = \"raw\"").is_ok());
}
