use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chernoff_kl::cert::BoundCertificate;
use chernoff_kl::verification::ExperimentReport;

const KLCERT: &str = env!("CARGO_BIN_EXE_klcert");

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn klcert(args: &[&str]) -> Output {
    Command::new(KLCERT).args(args).output().expect("klcert runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn certify(path: &Path, format: &str, extra: &[&str]) -> Output {
    let mut args = vec!["certify", "--input", path.to_str().unwrap(), "--format", format];
    args.extend_from_slice(extra);
    klcert(&args)
}

fn certificate(out: &Output) -> BoundCertificate {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    BoundCertificate::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn golden_certificates_are_byte_stable() {
    for name in ["zeros_n10", "mean0.1_n100"] {
        let out = klcert(&["certify", "--input", &fixture(&format!("{name}.csv")), "--format", "csv"]);
        let golden = fs::read(format!("{}/tests/golden/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap();
        assert_eq!(out.stdout, golden, "{name}");
    }
}

#[test]
fn formats_agree_on_the_same_losses() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "l.csv", "loss\n0.25\n0.1\n0\n");
    let jsonl = fixture("mixed.jsonl");
    let plain = write(dir.path(), "l.txt", "0.25\n0.1\n0.0\n");
    let a = certificate(&certify(&csv, "csv", &[]));
    let b = certificate(&certify(Path::new(&jsonl), "jsonl", &[]));
    let c = certificate(&certify(&plain, "plain", &[]));
    assert_eq!(a.bound_upper, b.bound_upper);
    assert_eq!(a.bound_upper, c.bound_upper);
    assert_eq!(a.n, 3);
    // Different bytes, different digest.
    assert_ne!(a.input_digest, b.input_digest);
    assert_ne!(a.input_digest, c.input_digest);
}

#[test]
fn digest_tracks_file_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "a.csv", "loss\n0.5\n");
    let same = write(dir.path(), "b.csv", "loss\n0.5\n");
    let other = write(dir.path(), "c.csv", "loss\n0.50\n");
    let (x, y, z) = (
        certificate(&certify(&one, "csv", &[])),
        certificate(&certify(&same, "csv", &[])),
        certificate(&certify(&other, "csv", &[])),
    );
    assert_eq!(x.input_digest, y.input_digest);
    assert_ne!(x.input_digest, z.input_digest);
    assert_eq!(x.bound_upper, z.bound_upper);
    assert_eq!(x.input_digest.len(), 64);
}

#[test]
fn two_sided_and_note_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cert.json");
    let out = certify(
        Path::new(&fixture("mean0.1_n100.csv")),
        "csv",
        &["--two-sided", "--delta", "0.1", "--provenance-note", "fold 3", "--out", out_path.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let cert = BoundCertificate::from_json(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(cert.provenance_note.as_deref(), Some("fold 3"));
    let lower = cert.bound_lower.unwrap().get();
    assert!(lower < 0.1 && 0.1 < cert.bound_upper.get());
    assert!((cert.budget_nats - 20f64.ln() / 100.0).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |out: Output| out.status.code();

    assert_eq!(code(certify(Path::new(&fixture("out_of_range.csv")), "csv", &[])), Some(4));
    let nan = write(dir.path(), "nan.txt", "0.1\nNaN\n");
    assert_eq!(code(certify(&nan, "plain", &[])), Some(4));
    let empty = write(dir.path(), "empty.csv", "loss\n");
    assert_eq!(code(certify(&empty, "csv", &[])), Some(4));
    let header = write(dir.path(), "h.csv", "error\n0.1\n");
    assert_eq!(code(certify(&header, "csv", &[])), Some(4));
    let fine = write(dir.path(), "ok.csv", "loss\n0.1\n");
    assert_eq!(code(certify(&fine, "csv", &["--delta", "1"])), Some(4));
    assert_eq!(code(certify(&fine, "csv", &["--delta", "0"])), Some(4));

    assert_eq!(code(certify(&dir.path().join("missing.csv"), "csv", &[])), Some(3));
    assert_eq!(code(certify(&fine, "xml", &[])), Some(2));
    assert_eq!(code(klcert(&["frobnicate"])), Some(2));
    assert_eq!(code(klcert(&["table", "--n", "10", "--delta", "0.05", "--mean", "1.5", "--out", "/dev/null"])), Some(4));
}

#[test]
fn rejection_names_the_line() {
    let out = certify(Path::new(&fixture("out_of_range.csv")), "csv", &[]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 4"), "{stderr}");
    assert!(stderr.starts_with("klcert: "));
}

#[test]
fn table_writes_sorted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let status = klcert(&[
        "table", "--n", "100,10", "--delta", "0.05", "--mean", "0.2,0,0.2", "--out", out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,delta,mean,budget_nats,kl_upper,two_sided_lower,two_sided_upper,hoeffding_upper"
    );
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("10,0.05,0.0,"));
    assert!(lines[4].starts_with("100,0.05,0.2,"));
}

#[test]
fn simulate_reports_parse_and_pass() {
    let out = klcert(&[
        "simulate", "--dist", "twopoint:v0=0.1,v1=0.9,w=0.5", "--n", "15", "--delta", "0.1", "--trials", "20000",
        "--seed", "11", "--mode", "coverage-one-sided", "--threads", "2",
    ]);
    assert!(out.status.success());
    let report: ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.pass());
    match report {
        ExperimentReport::Coverage(r) => {
            assert_eq!(r.trials, 20_000);
            assert_eq!(r.config.seed, 11);
        }
        other => panic!("unexpected report {other:?}"),
    }

    let seeded = |seed: &str| {
        klcert(&[
            "simulate", "--dist", "uniform", "--n", "5", "--delta", "0.05", "--trials", "5000", "--seed", seed,
            "--mode", "tail-low:t=0.2",
        ])
        .stdout
    };
    assert_eq!(seeded("1"), seeded("1"));
    assert_ne!(seeded("1"), seeded("2"));
}

#[test]
fn simulate_rejects_bad_arguments() {
    let base = ["simulate", "--n", "5", "--delta", "0.05", "--trials", "10", "--seed", "1"];
    let run = |dist: &str, mode: &str| {
        let mut args = base.to_vec();
        args.extend_from_slice(&["--dist", dist, "--mode", mode]);
        klcert(&args).status.code()
    };
    assert_eq!(run("bernoulli:p=2", "coverage-one-sided"), Some(2));
    assert_eq!(run("uniform", "tail-low:t=0.9"), Some(4));
    assert_eq!(run("uniform", "sideways"), Some(2));
    let zero_threads = klcert(&[
        "simulate", "--dist", "uniform", "--n", "5", "--delta", "0.05", "--trials", "10", "--seed", "1", "--mode",
        "coverage-one-sided", "--threads", "0",
    ]);
    assert_eq!(zero_threads.status.code(), Some(2));
}

#[test]
fn injected_fault_fails_selfcheck() {
    let out = klcert(&["selfcheck", "--threads", "1", "--inject-fault", "kl-sign-flip"]);
    assert_eq!(out.status.code(), Some(5));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("first failing suite: equivalence"), "{stdout}");
    assert!(stdout.contains("SKIP"));
}
