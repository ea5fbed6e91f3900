//! End-to-end checks of the `grover` binary: artifact layout, console
//! contract, config precedence, and usage errors, all through real process
//! invocations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn grover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grover"))
        .args(args)
        .output()
        .expect("failed to spawn the grover binary")
}

fn run_ok(args: &[&str]) -> (String, String) {
    let out = grover(args);
    assert!(
        out.status.success(),
        "grover {args:?} failed\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Small fast corpus plus model flags shared by the training tests.
fn tiny_train_args<'a>(out: &'a str, seed: &'a str) -> Vec<&'a str> {
    vec![
        "train",
        "--synthetic",
        "--classes", "2",
        "--vocab-size", "40",
        "--docs-per-class", "30",
        "--test-docs-per-class", "10",
        "--signal", "0.4",
        "--doc-len-min", "6",
        "--doc-len-max", "12",
        "--synth-seed", "5",
        "--model", "bow_linear",
        "--embedding-dim", "8",
        "--seq-len", "12",
        "--epochs", "2",
        "--patience", "1",
        "--batch-size", "16",
        "--step-size", "0.5",
        "--max-meta-epochs", "4",
        "--seed", seed,
        "--out", out,
    ]
}

#[test]
fn train_writes_every_artifact_and_the_summary_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out_str = out.to_str().unwrap();
    let (stdout, _) = run_ok(&tiny_train_args(out_str, "3"));

    for name in [
        "config.toml",
        "initial_embeddings.vec",
        "records.jsonl",
        "curves.csv",
        "checkpoint/manifest.json",
        "checkpoint/vocab.txt",
        "checkpoint/embeddings.vec",
        "checkpoint/model.params",
    ] {
        assert!(out.join(name).exists(), "missing artifact {name}");
    }

    let records = fs::read_to_string(out.join("records.jsonl")).unwrap();
    let rounds = records.lines().count();
    assert!(rounds >= 2, "expected at least two rounds, got {rounds}");
    let meta_lines: Vec<&str> = stdout
        .lines()
        .filter(|l| l.starts_with("meta="))
        .collect();
    assert_eq!(meta_lines.len(), rounds, "one meta= line per round");
    for (k, line) in meta_lines.iter().enumerate() {
        assert!(line.starts_with(&format!("meta={k} mask=")), "bad line {line:?}");
        assert!(line.contains(" val_acc=") && line.contains(" accepted="));
    }

    let last = stdout.lines().rev().find(|l| !l.is_empty()).unwrap();
    let fields: Vec<&str> = last.split_whitespace().collect();
    assert_eq!(fields[0], "baseline");
    assert_eq!(fields[2], "grover");
    assert_eq!(fields[4], "delta");
    assert!(fields[5].starts_with('+') || fields[5].starts_with('-'), "signed delta: {last}");
    fields[1].parse::<f64>().unwrap();
    fields[3].parse::<f64>().unwrap();
}

#[test]
fn same_seed_processes_write_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok(&tiny_train_args(a.to_str().unwrap(), "9"));
    run_ok(&tiny_train_args(b.to_str().unwrap(), "9"));
    for name in ["records.jsonl", "curves.csv", "checkpoint/embeddings.vec", "checkpoint/model.params"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs between identically seeded runs"
        );
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("run");
    fs::write(
        &cfg,
        "synthetic = true\nclasses = 2\nvocab_size = 40\ndocs_per_class = 30\n\
         test_docs_per_class = 10\nsignal = 0.4\ndoc_len_min = 6\ndoc_len_max = 12\n\
         synth_seed = 5\nmodel = \"bow_linear\"\nembedding_dim = 8\nseq_len = 12\n\
         epochs = 2\npatience = 1\nbatch_size = 16\nstep_size = 0.25\n\
         max_meta_epochs = 3\nseed = 1\n",
    )
    .unwrap();
    run_ok(&[
        "train",
        "--config", cfg.to_str().unwrap(),
        "--step-size", "0.5",
        "--out", out.to_str().unwrap(),
    ]);
    let echoed = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(echoed.contains("step_size = 0.5"), "flag should win:\n{echoed}");
    assert!(echoed.contains("embedding_dim = 8"), "file keys survive:\n{echoed}");
}

#[test]
fn the_echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok(&tiny_train_args(a.to_str().unwrap(), "4"));
    run_ok(&[
        "train",
        "--config", a.join("config.toml").to_str().unwrap(),
        "--out", b.to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read(a.join("records.jsonl")).unwrap(),
        fs::read(b.join("records.jsonl")).unwrap()
    );
}

#[test]
fn synth_writes_deterministic_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let args = |out: &Path, seed: &str| {
        vec![
            "synth".to_string(),
            "--out".into(), out.to_str().unwrap().into(),
            "--classes".into(), "3".into(),
            "--vocab-size".into(), "50".into(),
            "--docs-per-class".into(), "20".into(),
            "--test-docs-per-class".into(), "5".into(),
            "--seed".into(), seed.into(),
        ]
    };
    let run = |argv: Vec<String>| {
        let out = Command::new(env!("CARGO_BIN_EXE_grover")).args(&argv).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(args(&a, "7"));
    run(args(&b, "7"));
    run(args(&c, "8"));

    let train_a = fs::read(a.join("train.csv")).unwrap();
    assert_eq!(train_a, fs::read(b.join("train.csv")).unwrap());
    assert_eq!(fs::read(a.join("test.csv")).unwrap(), fs::read(b.join("test.csv")).unwrap());
    assert_ne!(train_a, fs::read(c.join("train.csv")).unwrap(), "seed must matter");

    let train = String::from_utf8(train_a).unwrap();
    assert_eq!(train.lines().count(), 60, "3 classes x 20 docs");
    for line in train.lines() {
        let (label, _) = line.split_once(',').unwrap();
        assert!(label.parse::<usize>().unwrap() < 3);
    }
}

#[test]
fn analyze_reports_neighbors_drift_and_churn() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    run_ok(&tiny_train_args(out.to_str().unwrap(), "3"));
    // pick a cue straight from the corpus vocabulary file
    let vocab = fs::read_to_string(out.join("checkpoint/vocab.txt")).unwrap();
    let cue = vocab.lines().nth(2).unwrap().split('\t').next().unwrap().to_string();

    let ckpt = out.join("checkpoint");
    let (stdout, stderr) = run_ok(&[
        "analyze",
        ckpt.to_str().unwrap(),
        "--cue", &cue,
        "--cue", "definitely_not_a_token",
        "-k", "5",
    ]);
    assert!(stdout.contains(&format!("{cue}:")), "neighbor row for the cue:\n{stdout}");
    assert!(stdout.contains("drift against "), "drift summary:\n{stdout}");
    assert!(stdout.contains(&format!("churn cue={cue} overlap=")), "churn row:\n{stdout}");
    assert!(stderr.contains("definitely_not_a_token"), "unknown cue warns:\n{stderr}");
}

#[test]
fn sweep_writes_aggregates_and_validates_its_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let mut args = tiny_train_args(out.to_str().unwrap(), "2");
    args[0] = "sweep";
    args.extend(["--sweep", "noise_range=0.5,2.0", "--repeats", "2"]);
    let (stdout, _) = run_ok(&args);
    assert!(out.join("sweep.json").exists());
    assert!(stdout.contains("sweep noise_range=0.5 runs=2"));
    assert!(stdout.contains("sweep noise_range=2.0 runs=2"));

    let mut bad = tiny_train_args(out.to_str().unwrap(), "2");
    bad[0] = "sweep";
    bad.extend(["--sweep", "learning_rate=0.1"]);
    let res = grover(&bad);
    assert!(!res.status.success(), "unknown axis must fail");
    let stderr = String::from_utf8(res.stderr).unwrap();
    for name in ["step_size", "noise_range", "policy", "dropout", "word_drop"] {
        assert!(stderr.contains(name), "usage error lists {name}:\n{stderr}");
    }
}

#[test]
fn missing_inputs_are_refused_with_a_nonzero_exit() {
    // no data source at all
    let res = grover(&["train", "--out", "/tmp/never-used"]);
    assert!(!res.status.success());
    assert!(String::from_utf8(res.stderr).unwrap().contains("error:"));

    // both sources at once is a flag conflict
    let res = grover(&["train", "--data", "x.csv", "--synthetic", "--out", "/tmp/never-used"]);
    assert!(!res.status.success());

    // no output directory
    let res = grover(&["train", "--synthetic"]);
    assert!(!res.status.success());
    assert!(String::from_utf8(res.stderr).unwrap().contains("out"));
}

#[test]
fn a_closed_stdout_pipe_ends_the_process_quietly() {
    use std::io::Read;
    use std::process::Stdio;

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let mut child = Command::new(env!("CARGO_BIN_EXE_grover"))
        .args(tiny_train_args(out.to_str().unwrap(), "3"))
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();

    // Closing the read end before training finishes makes the report writes
    // hit a dead pipe, the same situation as `grover train ... | head -1`.
    drop(child.stdout.take());
    child.wait().unwrap();

    let mut stderr = String::new();
    child.stderr.take().unwrap().read_to_string(&mut stderr).unwrap();
    assert!(
        !stderr.contains("panicked") && !stderr.contains("Broken pipe"),
        "a dead pipe must not produce a panic:\n{stderr}"
    );
}
