//! End-to-end tests running the `partisan` binary on the shipped toy data.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_partisan"))
}

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn train_toy(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let corpus = repo_path("data/toy.jsonl");
    let mut args = vec![
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let result = run(&args);
    assert_success(&result);
    assert!(out.is_file());
    out
}

#[test]
fn train_writes_archive() {
    let dir = tempfile::tempdir().unwrap();
    let archive = train_toy(dir.path(), "model.bin", &[]);
    let bytes = std::fs::read(archive).unwrap();
    assert_eq!(&bytes[..8], b"PARTISAN");
}

#[test]
fn train_with_full_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = repo_path("configs/default.toml");
    train_toy(
        dir.path(),
        "model.bin",
        &["--config", config.to_str().unwrap()],
    );
}

#[test]
fn predict_emits_probability_tsv_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_toy(dir.path(), "model.bin", &[]);
    let corpus = repo_path("data/toy.jsonl");

    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = run(&[
            "predict",
            "--model",
            model.to_str().unwrap(),
            "--corpus",
            corpus.to_str().unwrap(),
        ]);
        assert_success(&out);
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1], "predict output must be byte-stable");

    let text = String::from_utf8(outputs[0].clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16);
    for line in &lines {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 3);
        let p: f64 = fields[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(fields[2] == "0" || fields[2] == "1");
    }
}

#[test]
fn evaluate_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_toy(dir.path(), "model.bin", &[]);
    let corpus = repo_path("data/toy.jsonl");
    let out = run(&[
        "evaluate",
        "--model",
        model.to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("accuracy="), "got: {text}");
    assert!(text.contains("f1="));
}

#[test]
fn induce_lexicon_writes_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let out_left = dir.path().join("bl_left.txt");
    let out_right = dir.path().join("bl_right.txt");
    let scores = dir.path().join("so.tsv");
    let out = run(&[
        "induce-lexicon",
        "--left",
        repo_path("data/toy-left.jsonl").to_str().unwrap(),
        "--right",
        repo_path("data/toy-right.jsonl").to_str().unwrap(),
        "--out-left",
        out_left.to_str().unwrap(),
        "--out-right",
        out_right.to_str().unwrap(),
        "--scores-out",
        scores.to_str().unwrap(),
    ]);
    assert_success(&out);
    let left = std::fs::read_to_string(&out_left).unwrap();
    let right = std::fs::read_to_string(&out_right).unwrap();
    assert!(left.lines().count() > 0);
    assert!(right.lines().count() > 0);
    assert!(left.contains("union") || left.contains("healthcare"));
    assert!(right.contains("freedom") || right.contains("taxes"));
    for line in std::fs::read_to_string(&scores).unwrap().lines().take(5) {
        assert_eq!(line.split('\t').count(), 2);
    }
}

#[test]
fn induce_lexicon_default_threshold_is_04() {
    let out = run(&["induce-lexicon", "--help"]);
    assert_success(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("0.4"),
        "help should show the default threshold"
    );
}

#[test]
fn featurize_dumps_sparse_rows() {
    let dir = tempfile::tempdir().unwrap();
    let model = train_toy(dir.path(), "model.bin", &[]);
    let out = run(&[
        "featurize",
        "--corpus",
        repo_path("data/toy.jsonl").to_str().unwrap(),
        "--pipeline",
        model.to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# dim="));
    let dim: usize = header.trim_start_matches("# dim=").parse().unwrap();
    assert!(dim > 0);
    for line in lines {
        let (id, rest) = line.split_once('\t').unwrap();
        assert!(!id.is_empty());
        for pair in rest.split(' ').filter(|p| !p.is_empty()) {
            let (idx, val) = pair.split_once(':').unwrap();
            let idx: usize = idx.parse().unwrap();
            assert!(idx < dim);
            let _: f64 = val.parse().unwrap();
        }
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let full = train_toy(dir.path(), "full.bin", &[]);
    let small = train_toy(dir.path(), "small.bin", &["--k", "3"]);
    assert_ne!(
        std::fs::read(&full).unwrap(),
        std::fs::read(&small).unwrap()
    );

    let out = run(&[
        "predict",
        "--model",
        full.to_str().unwrap(),
        "--pipeline",
        small.to_str().unwrap(),
        "--corpus",
        repo_path("data/toy.jsonl").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("dimension"), "stderr: {stderr}");
    assert!(stderr.starts_with("error:"));
}

#[test]
fn ablate_runs_all_seven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let out = run(&[
        "ablate",
        "--train",
        repo_path("data/toy.jsonl").to_str().unwrap(),
        "--rows",
        repo_path("configs/ablation_rows.toml").to_str().unwrap(),
        "--eval",
        &format!("toy={}", repo_path("data/toy.jsonl").display()),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_success(&out);
    let csv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "config_name,eval_set,accuracy,precision,recall,f1,tp,fp,tn,fn"
    );
    assert_eq!(lines.len(), 1 + 7, "one row per config");
    assert!(lines[1].starts_with("bow_tfidf,toy,"));
    assert!(lines[7].starts_with("readability,toy,"));
}

#[test]
fn tune_selects_and_writes_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    std::fs::write(&grid, "[scales]\nrichness = [0.01, 0.1]\n").unwrap();
    let best = dir.path().join("best.toml");
    let out = run(&[
        "tune",
        "--train",
        repo_path("data/toy.jsonl").to_str().unwrap(),
        "--dev",
        repo_path("data/toy.jsonl").to_str().unwrap(),
        "--grid",
        grid.to_str().unwrap(),
        "--out",
        best.to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("best dev accuracy="));
    let rendered = std::fs::read_to_string(&best).unwrap();
    assert!(rendered.contains("[richness]"));
    let parsed: toml::Value = toml::from_str(&rendered).unwrap();
    assert!(parsed.get("word_ngrams").is_some());
}

#[test]
fn missing_file_gives_one_line_error() {
    let out = run(&[
        "evaluate",
        "--model",
        "/nonexistent/model.bin",
        "--corpus",
        repo_path("data/toy.jsonl").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.starts_with("error:"));
}

#[test]
fn unknown_flag_fails_with_usage() {
    let out = run(&["train", "--definitely-not-a-flag"]);
    assert!(!out.status.success());
}

#[test]
fn help_lists_documented_defaults() {
    for (cmd, needles) in [
        (
            "train",
            vec!["--c", "1", "--tol", "--max-iter", "1000", "--seed"],
        ),
        ("tune", vec!["--grid"]),
        ("predict", vec!["--pipeline"]),
    ] {
        let out = run(&[cmd, "--help"]);
        assert_success(&out);
        let text = String::from_utf8(out.stdout).unwrap();
        for needle in needles {
            assert!(text.contains(needle), "{cmd} --help missing {needle}");
        }
    }
}

#[test]
fn tsv_corpus_roundtrip_through_train() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("tiny.tsv");
    std::fs::write(
        &tsv,
        "a\t1\tOutrage and betrayal everywhere! Wake up people.\n\
         b\t0\tThe council met to review the budget schedule.\n\
         c\t1\tTraitors and liars run the corrupt machine. Disgusting!\n\
         d\t0\tOfficials published the quarterly report on Monday.\n",
    )
    .unwrap();
    let model = dir.path().join("model.bin");
    let out = run(&[
        "train",
        "--corpus",
        tsv.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_success(&out);
}
