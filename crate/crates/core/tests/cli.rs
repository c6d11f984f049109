//! The `skbench` binary end to end: subcommands and exit codes.

mod common;

use std::path::Path;
use std::process::{Command, Output};

fn skbench(args: &[&str], run_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skbench"))
        .args(args)
        .env("SKBENCH_RUN_DIR", run_dir)
        .env("SKBENCH_JOBS", "2")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn topics_jsonl(n: usize) -> String {
    common::topic_corpus(n, 9).iter().map(|d| serde_json::to_string(d).unwrap() + "\n").collect()
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs");
    write(dir.path(), "topics.jsonl", &topics_jsonl(150));
    let config = write(
        dir.path(),
        "run.json",
        r#"{"task": "sentiment", "model_kind": "baseline-tfidf", "data": {"input": "topics.jsonl"}, "seed": 5}"#,
    );
    let out = skbench(&["run", "--config", &config], &runs);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run_dirs: Vec<_> = std::fs::read_dir(&runs).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(run_dirs.len(), 1);
    assert!(run_dirs[0].file_name().unwrap().to_string_lossy().starts_with("sentiment-baseline-tfidf-"));
    for f in ["metrics.json", "report.json", "config.json"] {
        assert!(run_dirs[0].join(f).exists(), "{f}");
    }

    let tsv = dir.path().join("table.tsv");
    let out = skbench(&["report", "--task", "sentiment", runs.to_str().unwrap(), "--tsv", tsv.to_str().unwrap()], &runs);
    assert_eq!(code(&out), 0);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("baseline-tfidf") && table.contains('*'), "{table}");
    assert!(std::fs::read_to_string(tsv).unwrap().starts_with("model\tmacro_f1_3"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"task": "sentiment", "model_kind": "baseline-tfidf", "data": {}, "colour": 1}"#);
    assert_eq!(code(&skbench(&["run", "--config", &bad], dir.path())), 2);
    // probe task with a classifier baseline is not a valid combination
    write(dir.path(), "x.jsonl", "{\"text\":\"a\",\"label\":\"positive\"}\n");
    let combo = write(dir.path(), "combo.json", r#"{"task": "probe", "model_kind": "baseline-tfidf", "data": {"input": "x.jsonl"}}"#);
    assert_eq!(code(&skbench(&["run", "--config", &combo], dir.path())), 2);
    assert_eq!(code(&skbench(&["report", "--task", "poetry", "."], dir.path())), 2);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    assert_eq!(code(&skbench(&["clean", missing.to_str().unwrap()], dir.path())), 3);
    let broken = write(dir.path(), "broken.conllu", "1\tpes\tNOUN\n");
    let out = dir.path().join("out.jsonl");
    assert_eq!(code(&skbench(&["ingest", "pos", &broken, "-o", out.to_str().unwrap()], dir.path())), 3);
}

#[test]
fn metric_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sts.tsv", "a\tb\t1\nc\td\t3\ne\tf\t5\n");
    // identical vectors everywhere: every cosine is 1, so Spearman is undefined
    write(dir.path(), "vectors.txt", &"1 2 3\n".repeat(6));
    let config = write(
        dir.path(),
        "sts.json",
        r#"{"task": "sts", "model_kind": "external-embeddings", "data": {"test": "sts.tsv", "embeddings": "vectors.txt"}}"#,
    );
    let out = skbench(&["run", "--config", &config], &dir.path().join("runs"));
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn corpus_and_tokenizer_commands() {
    let dir = tempfile::tempdir().unwrap();
    let docs = write(
        dir.path(),
        "docs.jsonl",
        "{\"source_id\":\"a\",\"title\":\"Počasie\",\"text\":\"Zajtra bude pršať!!! Viac na https://x.sk. Pozri {reklama} tu.\"}\n\
         {\"source_id\":\"b\",\"title\":\"Šport\",\"text\":\"Zajtra bude pršať!!! Hráči trénujú.\"}\n",
    );
    let sentences = dir.path().join("sentences.txt");
    let out = skbench(&["segment", &docs, "-o", sentences.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&sentences).unwrap();
    assert!(text.contains("<url>") && !text.contains("reklama") && !text.contains("!!"), "{text}");

    let unique = dir.path().join("unique.txt");
    assert_eq!(code(&skbench(&["dedup", sentences.to_str().unwrap(), "-o", unique.to_str().unwrap()], dir.path())), 0);
    let kept = std::fs::read_to_string(&unique).unwrap();
    assert_eq!(kept.lines().filter(|l| l.starts_with("Zajtra")).count(), 1, "{kept}");

    let model = dir.path().join("bpe");
    let out = skbench(&["train-bpe", unique.to_str().unwrap(), "--vocab-size", "80", "-o", model.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(model.join("vocab.json").exists() && model.join("merges.txt").exists());
    let out = skbench(&["tokenize", "--model", model.to_str().unwrap(), unique.to_str().unwrap(), "--ids"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), kept.lines().count());
}

#[test]
fn baseline_train_and_predict() {
    let dir = tempfile::tempdir().unwrap();
    let train = write(dir.path(), "train.jsonl", &topics_jsonl(120));
    let test = write(dir.path(), "test.jsonl", &topics_jsonl(9));
    let model = dir.path().join("model");
    let out = skbench(
        &["train-baseline", "--task", "sentiment", "--model", "tfidf", "--train", &train, "-o", model.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = skbench(&["predict-baseline", "--model", model.to_str().unwrap(), &test], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 9);
}
