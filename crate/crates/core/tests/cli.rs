use std::path::Path;
use std::process::{Command, Output};

fn spellcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spellcorr")).args(args).output().expect("run spellcorr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn toy(dir: &Path) -> (String, String) {
    let o = spellcorr(&["gen-fixtures", "--toy", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let s = dir.to_str().unwrap();
    (format!("{s}/lexicon.txt"), format!("{s}/corpus.tsv"))
}

#[test]
fn correct_known_word_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("lex.txt");
    std::fs::write(&lex, "kot\nkos\npies\n").unwrap();
    let o = spellcorr(&["correct", "--method", "edit", "--lexicon", lex.to_str().unwrap(), "kot"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("kot 0.0"));
}

#[test]
fn evaluate_without_corpus_is_usage_error() {
    let o = spellcorr(&["evaluate", "--method", "edit"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn missing_lexicon_is_data_error() {
    let o = spellcorr(&["correct", "--method", "edit", "--lexicon", "/nonexistent/lex.txt", "kot"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diacritic_restores_toy_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (lex, corpus) = toy(dir.path());
    let o = spellcorr(&["correct", "--method", "diacritic", "--lexicon", &lex, "-k", "1", "olowek"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("ołówek "), "{}", stdout(&o));
    let o = spellcorr(&[
        "evaluate", "--corpus", &corpus, "--lexicon", &lex, "--method", "edit,diacritic", "--format", "tsv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3, "{out}");
}

#[test]
fn trained_model_memorizes_toy_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (lex, corpus) = toy(dir.path());
    let model = dir.path().join("lstm1.bin");
    let model = model.to_str().unwrap();
    let o = spellcorr(&[
        "train", "--corpus", &corpus, "--fractions", "1,0,0", "--out", model, "--batch-size", "8", "--lr", "0.003",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().any(|l| l.starts_with("final_loss\t")));
    let o = spellcorr(&[
        "evaluate", "--corpus", &corpus, "--fractions", "1,0,0", "--eval-split", "train", "--method", "lstm1",
        "--model", model, "--lexicon", &lex, "--format", "tsv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let acc = header.iter().position(|h| *h == "accuracy").expect("accuracy column");
    assert_eq!(row[acc].parse::<f64>().unwrap(), 1.0, "{out}");
}
