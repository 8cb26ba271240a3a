use std::path::Path;
use std::process::{Command, Output};

const ESF: &str = env!("CARGO_BIN_EXE_esf");

fn run(args: &[&str]) -> Output {
    Command::new(ESF)
        .args(args)
        .env_remove("ESF_PRECISION_BITS")
        .output()
        .expect("run esf")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn value_prints_reduced_fractions() {
    let out = run(&["value", "4", "4", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1/1\n");
    assert_eq!(stdout(&run(&["value", "--t", "4", "2"])), "35/24\n");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["value", "5", "6", "2"])), 1);
    assert_eq!(code(&run(&["value", "5"])), 1);
    assert_eq!(code(&run(&["value", "--t", "5", "1", "1"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["margin", "50216"])), 1);
    assert_eq!(code(&run(&["theta", "--x-lo", "2"])), 1);
    assert_eq!(code(&run(&["scan", "--n-end", "10", "--resume"])), 1);
    assert_eq!(code(&run(&["scan", "--n-start", "1", "--n-end", "10"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn parallel_scan_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hits.csv");
    let out = run(&[
        "scan",
        "--n-start",
        "2",
        "--n-end",
        "50",
        "--jobs",
        "4",
        "--out",
        p(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        "n,i,k,numerator,denominator\n2,2,1,1,1\n4,4,2,1,1\n"
    );
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("hits.summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["jobs"], 4);
    assert_eq!(summary["triples_checked"], summary["expected_triples"]);
}

#[test]
fn scan_resumes_from_cli_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("scan.ckpt");
    let first = dir.path().join("a.csv");
    let out = run(&[
        "scan",
        "--n-end",
        "60",
        "--checkpoint",
        p(&ckpt),
        "--checkpoint-every",
        "10",
        "--out",
        p(&first),
    ]);
    assert_eq!(code(&out), 0);
    let header = std::fs::read_to_string(&ckpt).unwrap();
    assert!(
        header.starts_with("ESF-CKPT v1 n=60 K=13\n"),
        "{}",
        &header[..40]
    );

    let resumed = dir.path().join("b.csv");
    let out = run(&[
        "scan",
        "--n-end",
        "90",
        "--checkpoint",
        p(&ckpt),
        "--resume",
        "--out",
        p(&resumed),
    ]);
    assert_eq!(code(&out), 0);
    let straight = dir.path().join("c.csv");
    assert_eq!(
        code(&run(&["scan", "--n-end", "90", "--out", p(&straight)])),
        0
    );
    assert_eq!(
        std::fs::read(&resumed).unwrap(),
        std::fs::read(&straight).unwrap()
    );
}

#[test]
fn corrupt_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("bad.ckpt");
    std::fs::write(&ckpt, "ESF-CKPT v9 n=5 K=4\n").unwrap();
    let out = run(&[
        "scan",
        "--n-end",
        "10",
        "--checkpoint",
        p(&ckpt),
        "--resume",
        "--out",
        p(&dir.path().join("h.csv")),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn certify_reports_gaps_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("certs.tsv");
    let out = run(&[
        "certify",
        "--n-start",
        "4",
        "--n-end",
        "4",
        "--out",
        p(&list),
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        std::fs::read_to_string(&list).unwrap(),
        "GAP\t4\t1\nGAP\t4\t2\nGAP\t4\t3\n"
    );

    let out = run(&[
        "certify",
        "--n-start",
        "13543",
        "--n-end",
        "13600",
        "--out",
        p(&list),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&list).unwrap();
    assert_eq!(text.lines().count(), 58 * 28);
    assert!(!text.contains("GAP"));
}

#[test]
fn analytic_checks() {
    let out = run(&["margin", "50217"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("holds"));
    assert_eq!(
        code(&run(&["theta", "--x-lo", "1429", "--x-hi", "3000"])),
        0
    );

    let low = Command::new(ESF)
        .args(["margin", "50217"])
        .env("ESF_PRECISION_BITS", "40")
        .output()
        .unwrap();
    assert_eq!(code(&low), 1);
    let high = Command::new(ESF)
        .args(["margin", "1000000"])
        .env("ESF_PRECISION_BITS", "256")
        .output()
        .unwrap();
    assert_eq!(code(&high), 0);
    assert!(stdout(&high).contains("at 256 bits"));
}
