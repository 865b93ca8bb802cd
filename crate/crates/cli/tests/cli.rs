use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use vnspam_core::synth::{synthetic_corpus, SynthConfig};
use vnspam_core::{model_file, Label};

fn vnspam() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vnspam"))
}

fn run(args: &[&str]) -> Output {
    vnspam().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = vnspam()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_corpus(dir: &Path, messages: usize) -> PathBuf {
    let path = dir.join("corpus.tsv");
    let corpus = synthetic_corpus(&SynthConfig {
        messages,
        ..SynthConfig::default()
    });
    let mut buf = Vec::new();
    corpus.write_tsv(&mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn train_twice_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 300);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let out = run(&["train", p(&corpus), "-o", p(&a)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = stdout(&out);
    assert!(summary.contains("after preprocessing"), "{summary}");
    assert!(summary.contains("document frequency >= 3"), "{summary}");
    assert!(run(&["train", p(&corpus), "-o", p(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn invalid_flags_exit_one_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 100);
    let model = dir.path().join("m.json");
    let out = run(&[
        "train",
        p(&corpus),
        "--clf",
        "knn",
        "--k",
        "0",
        "-o",
        p(&model),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!model.exists());
    assert_eq!(
        run(&["train", p(&corpus), "--clf", "svmx"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["train", p(&corpus), "--rep", "words"]).status.code(),
        Some(1)
    );
    let missing = dir.path().join("missing.tsv");
    assert_eq!(
        run(&["train", p(&missing), "-o", p(&model)]).status.code(),
        Some(1)
    );
    assert!(!model.exists());
}

#[test]
fn malformed_corpus_is_reported_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.tsv");
    std::fs::write(&corpus, "spam\tmua ngay\nmaybe\tsomething\n").unwrap();
    let out = run(&["train", p(&corpus), "-o", p(&dir.path().join("m.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn baseline_model_flags_tagged_messages() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 50);
    let model = dir.path().join("base.json");
    assert!(
        run(&["train", p(&corpus), "--clf", "baseline", "-o", p(&model)])
            .status
            .success()
    );
    let out = run_with_stdin(
        &["predict", "-m", p(&model)],
        "[QC] trung thuong ngay\nhello\n".as_bytes(),
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out), "spam\t1.0\nham\t0.0\n");
}

#[test]
fn predict_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 400);
    for clf in ["nb", "svm", "lr", "dt", "knn"] {
        let model = dir.path().join(format!("{clf}.json"));
        assert!(run(&["train", p(&corpus), "--clf", clf, "-o", p(&model)])
            .status
            .success());
        let pipeline = model_file::load(&model).unwrap();
        let inputs = [
            "[QC] Khuyen mai 50% nap the, goi 0912345678",
            "toi nay di an com chua em",
            "xyz qwerty",
            "",
            "Việt Nam :)",
        ];
        let out = run_with_stdin(&["predict", "-m", p(&model)], inputs.join("\n").as_bytes());
        assert!(out.status.success());
        let text = stdout(&out);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), inputs.len());
        for (line, input) in lines.iter().zip(inputs) {
            let pred = pipeline.predict(input).unwrap();
            assert_eq!(
                *line,
                format!("{}\t{:?}", pred.label, pred.score),
                "{clf}: {input}"
            );
        }
    }
}

#[test]
fn predict_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_stdin(
        &["predict", "-m", p(&dir.path().join("none.json"))],
        b"hi\n",
    );
    assert_eq!(out.status.code(), Some(2));
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"format_version\": 7}").unwrap();
    assert_eq!(
        run_with_stdin(&["predict", "-m", p(&garbage)], b"")
            .status
            .code(),
        Some(2)
    );

    let corpus = write_corpus(dir.path(), 100);
    let model = dir.path().join("m.json");
    assert!(run(&["train", p(&corpus), "--clf", "nb", "-o", p(&model)])
        .status
        .success());
    let empty = run_with_stdin(&["predict", "-m", p(&model)], b"");
    assert!(empty.status.success());
    assert!(empty.stdout.is_empty());

    let out = run_with_stdin(
        &["predict", "-m", p(&model)],
        b"di an com\n\xff\xfe\ncam on\n",
    );
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "ERR");
    assert!(lines[2].starts_with("ham\t") || lines[2].starts_with("spam\t"));
}

#[test]
fn oov_message_uses_the_majority_prior() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 200);
    let model = dir.path().join("nb.json");
    assert!(run(&[
        "train",
        p(&corpus),
        "--clf",
        "nb",
        "--no-length-feature",
        "-o",
        p(&model)
    ])
    .status
    .success());
    let out = run_with_stdin(&["predict", "-m", p(&model)], b"qqq zzz\n");
    assert!(stdout(&out).starts_with("ham\t"));
    let pipeline = model_file::load(&model).unwrap();
    assert_eq!(
        pipeline.predict("qqq zzz").unwrap().label,
        Label::Legitimate
    );
}

#[test]
fn evaluate_writes_one_row_per_fold_plus_average() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 300);
    let csv = dir.path().join("report.csv");
    let out = run(&[
        "evaluate",
        p(&corpus),
        "--grid",
        "svm-bow,svm-tfidf,baseline",
        "--folds",
        "3",
        "--jobs",
        "2",
        "--csv",
        p(&csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = stdout(&out);
    assert!(table.contains("svm-tfidf") && table.contains("FPR"));
    let csv = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("config,fold,tpr,tnr,fpr,fnr"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * (3 + 1));
    assert_eq!(
        rows.iter()
            .filter(|r| r.split(',').nth(1) == Some("avg"))
            .count(),
        3
    );
}

#[test]
fn evaluate_validation() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 100);
    assert_eq!(
        run(&["evaluate", p(&corpus), "--folds", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["evaluate", p(&corpus), "--grid", "nope"])
            .status
            .code(),
        Some(1)
    );
    let empty = run(&["evaluate", p(&corpus), "--grid", ""]);
    assert!(empty.status.success());
}

#[test]
fn tokenize_tags_and_lists_merges() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("t.tsv");
    let mut text = String::from("ham\tGoi 19001234 nhe\n");
    for c in 'a'..='j' {
        text.push_str(&format!("spam\ttin nhan x{c}\n"));
    }
    std::fs::write(&corpus, &text).unwrap();
    let out = run(&["tokenize", p(&corpus)]);
    assert!(out.status.success());
    let tokens = stdout(&out);
    assert_eq!(tokens.lines().next(), Some("goi <phone> nhe"));
    assert_eq!(tokens.lines().nth(1), Some("tin_nhan xa"));
    assert_eq!(run(&["tokenize", p(&corpus)]).stdout, out.stdout);

    let merges = stdout(&run(&["tokenize", p(&corpus), "--show-merges"]));
    let pairs: Vec<Vec<&str>> = merges.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(pairs.len(), 1, "{merges}");
    assert_eq!(&pairs[0][..3], ["tin", "nhan", "10"]);
}

#[test]
fn synth_output_round_trips_through_the_loader() {
    let out = run(&["synth", "--messages", "120", "--seed", "9"]);
    assert!(out.status.success());
    let corpus = vnspam_core::corpus::parse_corpus(&out.stdout).unwrap();
    assert_eq!(corpus.len(), 120);
    assert_eq!(corpus.counts().spam, 24);
    assert_eq!(
        run(&["synth", "--spam-fraction", "1.5"]).status.code(),
        Some(1)
    );
}

#[test]
fn help_exits_zero() {
    assert!(run(&["--help"]).status.success());
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}
