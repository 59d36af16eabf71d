use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn rankone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(args)
        .env_remove("RANKONE_THREADS")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is JSON"))
        .collect()
}

fn of_type<'a>(v: &'a [Value], t: &str) -> Vec<&'a Value> {
    v.iter().filter(|x| x["type"] == t).collect()
}

const SMALL: &[&str] = &[
    "ground-state",
    "--M",
    "2000",
    "--samples",
    "6",
    "--lambda",
    "2",
];

#[test]
fn passing_run_exits_zero_with_tagged_jsonl() {
    let out = rankone(SMALL);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = lines(&out);
    assert_eq!(v[0]["type"], "record");
    assert_eq!(v[0]["experiment"], "ground-state");
    assert_eq!(v[0]["provenance"]["seed"], 2_718_281_828u64);
    assert_eq!(v[0]["config"]["lambda"], 2.0);
    assert_eq!(of_type(&v, "row").len(), 6);
    for row in of_type(&v, "row") {
        for key in ["lambda", "m", "sample", "e0", "min_pole", "ratio21"] {
            assert!(row.get(key).is_some(), "row lacks {key}");
        }
    }
    assert!(of_type(&v, "check").iter().all(|c| c["pass"] == true));
}

#[test]
fn same_seed_reproduces_rows() {
    let rows = |o: &Output| {
        lines(o)
            .into_iter()
            .filter(|x| x["type"] == "row")
            .collect::<Vec<_>>()
    };
    let a = rankone(SMALL);
    let b = rankone(SMALL);
    assert_eq!(rows(&a), rows(&b));
    let mut other = SMALL.to_vec();
    other.extend(["--seed", "7"]);
    assert_ne!(rows(&a), rows(&rankone(&other)));
}

#[test]
fn failed_check_exits_one() {
    // λ < 1 at small M misses the κ⁴ ground-state accuracy.
    let out = rankone(&[
        "ground-state",
        "--M",
        "2000",
        "--samples",
        "20",
        "--lambda",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL ground_dev"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "lamda = 1.0\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["localization", "--center", "E_hat"],
        vec!["ground-state", "--M", "1"],
        vec!["ground-state", "--samples", "0"],
        vec!["ground-state", "--config", bad.to_str().unwrap()],
        vec!["ground-state", "--config", "/nonexistent/config.toml"],
        vec!["single-extended", "--lambda", "2", "--samples", "2"],
        vec!["ground-state", "--format", "xml"],
    ];
    for args in cases {
        let out = rankone(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "lambda = 2.0\nsamples = 3\nM = 1000\nseed = 11\n").unwrap();
    let path = cfg.to_str().unwrap();
    let v = lines(&rankone(&["ground-state", "--config", path]));
    assert_eq!(of_type(&v, "row").len(), 3);
    assert_eq!(v[0]["config"]["m"], serde_json::json!([1000]));
    assert_eq!(v[0]["provenance"]["seed"], 11);
    let v = lines(&rankone(&[
        "ground-state",
        "--config",
        path,
        "--samples",
        "5",
        "--M",
        "1500",
        "--M",
        "2500",
    ]));
    assert_eq!(of_type(&v, "row").len(), 10);
    assert_eq!(v[0]["config"]["lambda"], 2.0);
    assert_eq!(v[0]["config"]["m"], serde_json::json!([1500, 2500]));
}

#[test]
fn csv_summary_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("summary.csv");
    let mut args = SMALL.to_vec();
    args.extend(["--format", "csv", "--out", out_path.to_str().unwrap()]);
    let out = rankone(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "median_ratio21"));
    assert_eq!(reader.records().count(), 1);
}

#[test]
fn hilbert_table_rows_and_centers() {
    let out = rankone(&["hilbert-table", "--lambda", "1", "--M", "100000"]);
    let v = lines(&out);
    assert_eq!(of_type(&v, "row").len(), 201);
    let refs: Vec<_> = of_type(&v, "summary")
        .into_iter()
        .filter(|s| s["check"] == "reference_energies" && s.get("m").is_some())
        .collect();
    assert_eq!(refs.len(), 1);
    let e = refs[0]["e_minus1"].as_f64().unwrap();
    let k = refs[0]["kappa"].as_f64().unwrap();
    assert!((e + 1.0 + k * k).abs() <= 5.0 * k.powi(4));
}

#[test]
fn corrupted_tolerance_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("neg.toml");
    fs::write(&cfg, "tol = 1e-2\nverify_scale = 0.01\n").unwrap();
    let out = rankone(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let checks = lines(&out);
    let oracle = checks
        .iter()
        .find(|c| c["type"] == "check" && c["name"] == "oracle_equivalence")
        .expect("oracle check present");
    assert_eq!(oracle["pass"], false);
}

#[test]
fn worker_cap_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(SMALL)
        .env("RANKONE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(SMALL)
        .env("RANKONE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
