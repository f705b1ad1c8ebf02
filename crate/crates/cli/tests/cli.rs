use std::path::Path;
use std::process::{Command, Output};

fn orthorec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthorec"))
        .args(args)
        .env_remove("ORTHOREC_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn exact_coefficients_as_csv() {
    let out = orthorec(&[
        "-q", "--engine", "exact", "--n-max", "5", "--format", "csv", "coeffs",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "n,numerator,denominator\n0,1,1\n1,-3,2\n2,5,24\n3,77,720\n4,277,4480\n5,140173,3628800\n"
    );
}

#[test]
fn json_envelope_carries_provenance() {
    let out = orthorec(&[
        "-q", "--n-max", "50", "--format", "json", "sums", "--at", "10,50",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["engine"], "ball");
    assert_eq!(v["precision_bits"], 128);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["n"], 50);
    assert!(rows[1]["radius"].as_f64().unwrap() < 1e-30);
}

#[test]
fn inequality_suite_passes_on_exact_range() {
    let out = orthorec(&[
        "-q",
        "verify",
        "--suite",
        "inequalities",
        "--n-max",
        "200",
        "--engine",
        "exact",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("status: pass"));
}

#[test]
fn exact_only_suites() {
    let out = orthorec(&[
        "-q", "--engine", "exact", "--n-max", "40", "verify", "--suite", "all",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for check in [
        "two_adic_valuation",
        "determinant",
        "permutation_sum",
        "lemma1",
    ] {
        assert!(text.contains(check), "{check} missing");
    }
    // the printed integrality claim does not hold from n = 2 on
    let out = orthorec(&[
        "-q",
        "--engine",
        "exact",
        "--n-max",
        "10",
        "verify",
        "--suite",
        "integrality",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sign_changes_below_one_hundred() {
    let out = orthorec(&["-q", "--n-max", "100", "--format", "json", "signs"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["indices"], serde_json::json!([0, 1, 26]));
    let out = orthorec(&["-q", "--n-max", "100", "--engine", "exact", "signs"]);
    assert!(stdout(&out).contains("indices: 0 1 26\n"));
}

#[test]
fn series_commands_pass_on_small_tables() {
    for args in [
        &["identities", "--r", "0,1"][..],
        &["functional", "--t", "0.25,0.5"],
        &["integral", "--t", "0.25"],
        &["dirichlet"],
    ] {
        let mut full = vec!["-q", "--n-max", "400"];
        full.extend_from_slice(args);
        let out = orthorec(&full);
        assert_eq!(code(&out), 0, "{args:?}: {}", stdout(&out));
    }
}

#[test]
fn tight_tolerance_is_a_failure() {
    let out = orthorec(&[
        "-q",
        "--n-max",
        "50",
        "--tolerance",
        "1e-12",
        "identities",
        "--r",
        "2",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cross_validation_passes() {
    let out = orthorec(&[
        "-q",
        "--n-max",
        "300",
        "cross-validate",
        "--exact-n-max",
        "80",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("324 values for n <= 80"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&orthorec(&["bogus"])), 64);
    assert_eq!(
        code(&orthorec(&[
            "--engine", "exact", "--n-max", "2500", "coeffs"
        ])),
        64
    );
    assert_eq!(
        code(&orthorec(&["--n-max", "10", "coeffs", "--at", "11"])),
        64
    );
    assert_eq!(
        code(&orthorec(&["--n-max", "10", "--precision", "8", "coeffs"])),
        64
    );
    assert_eq!(
        code(&orthorec(&["--n-max", "10", "functional", "--t", "1.5"])),
        64
    );
    assert_eq!(code(&orthorec(&["--help"])), 0);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "-q",
        "--n-max",
        "300",
        "--format",
        "json",
        "delta",
        "--at",
        "250",
        "--window-lo",
        "100",
    ];
    let a = orthorec(&args);
    let b = orthorec(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

fn cached(dir: &Path, args: &[&str]) -> Output {
    let mut full = vec!["-q", "--cache", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    orthorec(&full)
}

#[test]
fn cache_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = cached(dir.path(), &["--n-max", "120", "--format", "csv", "coeffs"]);
    assert_eq!(code(&first), 0);
    assert!(dir.path().join("ball-n120-p128.csv").is_file());
    let second = cached(dir.path(), &["--n-max", "120", "--format", "csv", "coeffs"]);
    assert_eq!(first.stdout, second.stdout);
    let fresh = orthorec(&["-q", "--n-max", "120", "--format", "csv", "coeffs"]);
    assert_eq!(first.stdout, fresh.stdout);
}

#[test]
fn exact_cache_is_promoted_for_ball_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = cached(
        dir.path(),
        &["--engine", "exact", "--n-max", "60", "coeffs"],
    );
    assert_eq!(code(&out), 0);
    let exact = dir.path().join("exact-n60.csv");
    assert!(exact.is_file());
    let out = cached(
        &exact,
        &["--n-max", "60", "--format", "json", "coeffs", "--at", "5"],
    );
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["engine"], "ball");
    assert!(v["result"]["rows"][0]["value"]
        .as_str()
        .unwrap()
        .starts_with("3.86279210758377"));
    // a shorter request is served from the longer table
    let out = cached(
        &exact,
        &[
            "--engine", "exact", "--n-max", "3", "--format", "csv", "coeffs",
        ],
    );
    assert_eq!(
        stdout(&out),
        "n,numerator,denominator\n0,1,1\n1,-3,2\n2,5,24\n3,77,720\n"
    );
}

#[test]
fn ball_cache_is_not_accepted_as_exact() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cached(dir.path(), &["--n-max", "30", "coeffs"])), 0);
    let ball = dir.path().join("ball-n30-p128.csv");
    assert_eq!(
        code(&cached(
            &ball,
            &["--engine", "exact", "--n-max", "30", "coeffs"]
        )),
        65
    );
}

#[test]
fn corrupted_cache_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cached(dir.path(), &["--n-max", "30", "coeffs"])), 0);
    let path = dir.path().join("ball-n30-p128.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\n5,", "\n5,-", 1);
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();
    assert_eq!(code(&cached(dir.path(), &["--n-max", "30", "coeffs"])), 65);
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_orthorec"))
        .args(["-q", "--engine", "exact", "--n-max", "20", "coeffs"])
        .env("ORTHOREC_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("exact-n20.csv").is_file());
}
