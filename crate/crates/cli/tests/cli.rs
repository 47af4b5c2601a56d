use std::io::Write;
use std::process::{Command, Output};

use qsl_core::experiment::{replay, Algorithm, ExperimentRecord};

fn qsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl")).args(args).output().unwrap()
}

fn qsl_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn records(out: &Output) -> Vec<ExperimentRecord> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn strip_times(mut rs: Vec<ExperimentRecord>) -> Vec<ExperimentRecord> {
    rs.iter_mut().for_each(|r| r.wall_time_ms = 0.0);
    rs
}

#[test]
fn dj_at_one_hundred_thousand_bits() {
    let out = qsl(&["dj", "--n", "100000", "--trials", "1", "--seed", "7"]);
    assert!(out.status.success());
    let rs = records(&out);
    assert_eq!(rs.len(), 1);
    assert_eq!((rs[0].queries, rs[0].correct, rs[0].n), (1, true, 100_000));
}

#[test]
fn dj_small_trials_all_correct_and_replayable() {
    let out = qsl(&["dj", "--n", "3", "--trials", "100", "--seed", "1"]);
    assert!(out.status.success());
    let rs = records(&out);
    assert_eq!(rs.len(), 100);
    let kinds: std::collections::HashSet<_> = rs.iter().map(|r| r.verdict.clone().unwrap()).collect();
    assert_eq!(kinds.len(), 2, "kind should vary per trial");
    for (t, r) in rs.iter().enumerate() {
        assert_eq!(r.trial, t as u64);
        assert!(r.correct && r.queries == 1 && r.schema_version == 1);
        assert!(replay(r, None).unwrap().same_outcome(r));
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["dj", "--n", "0"][..],
        &["simon", "--n", "1"],
        &["simon", "--n", "4", "--mode", "sometimes"],
        &["dj", "--n", "4", "--perm-depth-factor", "0"],
        &["verify", "--max-n", "7"],
        &["frobnicate"],
        &[],
    ] {
        let out = qsl(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(qsl(&["--help"]).status.code(), Some(0));
    assert_eq!(qsl_env(&["dj", "--n", "3"], "QSL_THREADS", "zero").status.code(), Some(1));
}

#[test]
fn simon_det_at_512_bits() {
    let out = qsl(&["simon", "--n", "512", "--mode", "det", "--trials", "1", "--seed", "3"]);
    assert!(out.status.success());
    let rs = records(&out);
    assert_eq!(rs[0].algorithm, Algorithm::SimonDet);
    assert_eq!((rs[0].queries, rs[0].correct), (514, true));
    assert_eq!(rs[0].secret.as_ref().unwrap().len(), 512);
}

#[test]
fn simon_prob_query_accounting() {
    let out = qsl(&["simon", "--n", "8", "--mode", "prob", "--trials", "500"]);
    assert!(out.status.success());
    let rs = records(&out);
    assert_eq!(rs.len(), 500);
    assert!(rs.iter().all(|r| r.correct && r.queries == r.iterations + 2));
    let mean = rs.iter().map(|r| r.iterations as f64).sum::<f64>() / 500.0;
    assert!(mean <= 11.0, "{mean}");
}

#[test]
fn simon_prob_budget_exhaustion_exits_two() {
    let out = qsl(&["simon", "--n", "8", "--mode", "prob", "--max-iters", "3", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let rs = records(&out);
    assert!(rs.iter().all(|r| !r.correct && r.error.is_some() && r.verdict.is_none()));
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = ["simon", "--n", "6", "--mode", "prob", "--trials", "300", "--seed", "11"];
    let one = strip_times(records(&qsl_env(&args, "QSL_THREADS", "1")));
    let many = strip_times(records(&qsl_env(&args, "QSL_THREADS", "4")));
    assert_eq!(one.len(), 300);
    assert_eq!(one, many);
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = qsl(&[
        "simon", "--n", "5", "--trials", "4", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "schema_version");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let spec_col = header.iter().position(|h| h == "oracle_spec").unwrap();
    for row in rows {
        let spec: qsl_core::OracleSpec = serde_json::from_str(&row[spec_col]).unwrap();
        assert_eq!(spec.n(), 5);
    }
}

#[test]
fn verify_defaults_pass() {
    let out = qsl(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().last().unwrap().contains("0 failed"));
}

#[test]
fn verify_breach_exits_two_with_diagnostics() {
    // Ten samples cannot cover the support, so every Simon case fails.
    let out = qsl(&["verify", "--max-n", "3", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL simon")));
}

#[test]
fn verify_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"type":"dj","n":4,"kind":"balanced","perm":{"form":"table","table":[3,1,4,0,5,9,2,6,8,7,10,11,12,13,14,15]}}"#).unwrap();
    let out = qsl(&["verify", "--spec", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    let mut f = std::fs::File::create(&bad).unwrap();
    f.write_all(br#"{"type":"simon","n":3,"secret":"1011""#).unwrap();
    let out = qsl(&["verify", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("invalid oracle spec"));

    let wide = dir.path().join("wide.json");
    std::fs::write(&wide, r#"{"type":"simon","n":7,"secret":"0000001","perm":{"form":"gates","width":7,"ops":[]}}"#).unwrap();
    assert_eq!(qsl(&["verify", "--spec", wide.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(qsl(&["verify", "--spec", "/nonexistent/spec.json"]).status.code(), Some(1));
}

#[test]
fn bench_csv() {
    let out = qsl(&["bench", "--reps", "0"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "algorithm,n,rep,seed,build_ms,run_ms,solve_ms,total_ms,queries,correct\n"
    );

    let out = qsl(&["bench", "--algorithm", "simon-det", "--n-list", "16,32", "--reps", "2"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][8], "18");
    assert_eq!(&rows[3][8], "34");
    assert!(rows.iter().all(|r| &r[9] == "true"));

    let out = qsl(&["bench", "--n-list", "64", "--reps", "1", "--budget-secs", "0.000000001"]);
    assert_eq!(out.status.code(), Some(2));
}
