mod common;

use std::fs;

use common::{config, corpora};
use decipher_core::{decipher, frequency_encode, LanguageId, SpacingMode};
use decipher_workbench::dataset::ManifestRecord;
use decipher_workbench::textio::{read_jsonl, read_lines, tokens_to_chars};
use decipher_workbench::{build_dataset, build_splits, Error, Split};

const SMALL: &str = "lengths = [16]\ntrain_count = 10\ndev_count = 4\ntest_count = 3\nseed = 9";

#[test]
fn identical_configs_write_identical_files() {
    let cfg = config(&["en"], "lengths = [16, 32]\ntrain_count = 60\ndev_count = 6\ntest_count = 6\nseed = 4");
    let text = corpora(&[LanguageId::English], 20_000, 5_000);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    build_dataset(&cfg, &text).unwrap().write(a.path()).unwrap();
    build_dataset(&cfg, &text).unwrap().write(b.path()).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn export_files_are_line_aligned_and_consistent() {
    let cfg = config(&["en"], SMALL);
    let dir = tempfile::tempdir().unwrap();
    build_dataset(&cfg, &corpora(&[LanguageId::English], 5_000, 2_000)).unwrap().write(dir.path()).unwrap();

    let src = read_lines(&dir.path().join("train.src")).unwrap();
    let tgt = read_lines(&dir.path().join("train.tgt")).unwrap();
    let manifest: Vec<ManifestRecord> = read_jsonl(&dir.path().join("train.manifest.jsonl")).unwrap();
    assert_eq!((src.len(), tgt.len(), manifest.len()), (10, 10, 10));
    for ((s, t), rec) in src.iter().zip(&tgt).zip(&manifest) {
        let inst = &rec.instance;
        let plain = tokens_to_chars(t).unwrap();
        assert!(plain.len() <= 16);
        assert_eq!(plain.iter().collect::<String>(), inst.plaintext.text);
        assert_eq!(decipher(&inst.ciphertext, &inst.key).unwrap(), inst.plaintext.text);
        assert_eq!(s, &frequency_encode(&inst.ciphertext, false).render());
        assert_eq!(s.split(' ').count(), t.split(' ').count());
    }
    for split in ["dev", "test"] {
        assert_eq!(read_lines(&dir.path().join(format!("{split}.src"))).unwrap().len(), if split == "dev" { 4 } else { 3 });
    }
}

#[test]
fn dev_and_train_text_do_not_overlap() {
    let cfg = config(&["en"], SMALL);
    let bundle = build_dataset(&cfg, &corpora(&[LanguageId::English], 5_000, 2_000)).unwrap();
    let span = |split| {
        bundle
            .get(split)
            .iter()
            .map(|e| {
                let c = &e.record.instance.plaintext;
                (c.source_offset, c.source_offset + c.len())
            })
            .collect::<Vec<_>>()
    };
    let dev_end = span(Split::Dev).iter().map(|s| s.1).max().unwrap();
    assert!(span(Split::Train).iter().all(|s| s.0 > dev_end));

    // Building only the train split draws the same chunks.
    let train_only = build_splits(&cfg, &corpora(&[LanguageId::English], 5_000, 2_000), &[Split::Train]).unwrap();
    assert_eq!(train_only.get(Split::Train), bundle.get(Split::Train));
    assert!(train_only.get(Split::Dev).is_empty());
}

#[test]
fn languages_share_each_split_evenly() {
    let cfg = config(&["en", "fr"], "lengths = [32]\ntrain_count = 100\ndev_count = 10\ntest_count = 10");
    let bundle = build_dataset(&cfg, &corpora(&[LanguageId::English, LanguageId::French], 20_000, 5_000)).unwrap();
    for split in Split::ALL {
        let n_en = bundle.get(split).iter().filter(|e| e.record.instance.plaintext.language == LanguageId::English).count();
        assert_eq!(2 * n_en, bundle.get(split).len(), "{split}");
    }
    assert_eq!(bundle.get(Split::Train).len(), 100);
}

#[test]
fn every_example_gets_its_own_key() {
    let cfg = config(&["en"], SMALL);
    let bundle = build_dataset(&cfg, &corpora(&[LanguageId::English], 5_000, 2_000)).unwrap();
    let mut seeds: Vec<u64> = Split::ALL.iter().flat_map(|&s| bundle.get(s).iter().map(|e| e.record.key_seed)).collect();
    let n = seeds.len();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), n);
}

#[test]
fn generate_mode_targets_keep_their_spaces() {
    let cfg = config(&["en"], &format!("{SMALL}\nspacing_mode = \"no_space_generate\""));
    let bundle = build_dataset(&cfg, &corpora(&[LanguageId::English], 5_000, 2_000)).unwrap();
    for ex in bundle.get(Split::Train) {
        assert!(!ex.source.contains('_'));
        assert_eq!(ex.target.contains('_'), ex.record.instance.plaintext.text.contains(' '));
        assert_eq!(ex.record.instance.spacing_mode, SpacingMode::NoSpaceGenerate);
    }
}

#[test]
fn anagrammed_sources_are_sorted_within_words() {
    let cfg = config(&["en"], &format!("{SMALL}\nanagram = true\nencoding = \"sorted_bag\""));
    let bundle = build_dataset(&cfg, &corpora(&[LanguageId::English], 5_000, 2_000)).unwrap();
    for ex in bundle.get(Split::Train) {
        assert!(ex.record.anagram_seed.is_some());
        for word in ex.source.split(" _ ") {
            let ranks: Vec<u32> = word.split(' ').map(|r| r.parse().unwrap()).collect();
            assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{}", ex.source);
        }
    }
}

#[test]
fn short_corpus_reports_how_far_it_got() {
    let cfg = config(&["en"], "lengths = [16]\ntrain_count = 1000\ndev_count = 2\ntest_count = 2");
    match build_dataset(&cfg, &corpora(&[LanguageId::English], 600, 2_000)) {
        Err(Error::CorpusExhausted { split, requested, produced, .. }) => {
            assert_eq!(split, "train");
            assert_eq!(requested, 1000);
            assert!(produced > 0 && produced < 1000);
        }
        other => panic!("expected exhaustion, got {other:?}"),
    }
    let cfg = config(&["en"], "lengths = [16]\ntrain_count = 1000\ndev_count = 2\ntest_count = 2\nreuse_train_text = true");
    assert_eq!(build_dataset(&cfg, &corpora(&[LanguageId::English], 600, 2_000)).unwrap().get(Split::Train).len(), 1000);
}
