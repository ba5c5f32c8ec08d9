use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn normlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_then_show() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports.jsonl");
    let csv = dir.path().join("summary.csv");
    let out = normlab(&[
        "verify",
        "--chain",
        "main",
        "--n",
        "2",
        "--m",
        "2",
        "--count",
        "10",
        "--seed",
        "42",
        "--s",
        "2,3",
        "--r",
        "1,2",
        "--p",
        "1",
        "--t",
        "0.5",
        "--norms",
        "kyfan:all,schatten:1,schatten:2,schatten:inf",
        "--tol",
        "1e-8",
        "--out",
        path_str(&reports),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let first = fs::read_to_string(&reports).unwrap();
    assert!(first.lines().all(|l| l.starts_with("{\"schema_version\":1,")));

    let shown = normlab(&["show", "--in", path_str(&reports), "--csv", path_str(&csv)]);
    assert_eq!(code(&shown), 0);
    let table = fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("target,norm_class,records,pass,fail,gated,candidates,min_margin"));
    assert_eq!(table.lines().count(), 3);

    let again = dir.path().join("again.jsonl");
    normlab(&[
        "verify",
        "--chain",
        "main",
        "--n",
        "2",
        "--m",
        "2",
        "--count",
        "10",
        "--seed",
        "42",
        "--s",
        "2,3",
        "--r",
        "1,2",
        "--p",
        "1",
        "--t",
        "0.5",
        "--norms",
        "kyfan:all,schatten:1,schatten:2,schatten:inf",
        "--tol",
        "1e-8",
        "--out",
        path_str(&again),
    ]);
    assert_eq!(first, fs::read_to_string(&again).unwrap());
}

#[test]
fn every_verify_target_runs() {
    for chain in ["main", "geo-z", "t-chain", "commuting", "lemmas"] {
        let out = normlab(&[
            "verify", "--chain", chain, "--count", "5", "--s", "1,2", "--r", "1", "--p", "1",
        ]);
        assert_eq!(code(&out), 0, "{chain}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn config_errors_exit_three() {
    assert_eq!(code(&normlab(&["verify", "--chain", "nope"])), 3);
    assert_eq!(code(&normlab(&["verify", "--chain", "main", "--lo", "0"])), 3);
    assert_eq!(code(&normlab(&["verify", "--chain", "main", "--norms", "kyfan:0"])), 3);
    assert_eq!(code(&normlab(&["hunt", "--t", "1.5", "--samples", "2"])), 3);
    assert_eq!(code(&normlab(&["bogus"])), 3);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(
        &cfg,
        r#"{"n_values":[2],"m_values":[1],"instance_count":2,"base_seed":1,
            "param_grid":{"s":[1],"r":[1],"p":[1],"t":[0.5]},"chains":["commuting"]}"#,
    )
    .unwrap();
    assert_eq!(code(&normlab(&["sweep", "--config", path_str(&cfg)])), 3);
    fs::write(&cfg, "{not json").unwrap();
    assert_eq!(code(&normlab(&["sweep", "--config", path_str(&cfg)])), 3);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&normlab(&["--help"])), 0);
}

#[test]
fn sweep_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    let out = dir.path().join("out.jsonl");
    fs::write(
        &cfg,
        r#"{"n_values":[1,2,3],"m_values":[1,2],"instance_count":12,"base_seed":5,
            "generator":"commuting","spectrum_law":{"law":"loguniform","lo":0.1,"hi":10},
            "param_grid":{"s":[2,3],"r":[1,2],"p":[1],"t":[0.5]},
            "norms":["kyfan:all","schatten:2"],"tol_rel":1e-8,"condition_cap":1e8,
            "chains":["main","commuting","lemmas"]}"#,
    )
    .unwrap();
    let res = normlab(&["sweep", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(
        stdout.contains("commuting-product") && stdout.contains("araki"),
        "{stdout}"
    );
}

#[test]
fn hunt_writes_search_result() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hunt.json");
    let res = normlab(&[
        "hunt",
        "--s-lo",
        "1.0",
        "--s-hi",
        "2.0",
        "--t",
        "0.5",
        "--samples",
        "200",
        "--refine",
        "5",
        "--n-max",
        "3",
        "--m-max",
        "2",
        "--seed",
        "7",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("{\"schema_version\":1,\"record\":\"search\""));
    assert_eq!(code(&normlab(&["show", "--in", path_str(&out)])), 0);
}

#[test]
fn proven_candidate_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports.jsonl");
    normlab(&["verify", "--chain", "main", "--count", "2", "--out", path_str(&reports)]);
    let text = fs::read_to_string(&reports)
        .unwrap()
        .replace("\"proven_candidates\":0", "\"proven_candidates\":1");
    fs::write(&reports, text).unwrap();
    assert_eq!(code(&normlab(&["show", "--in", path_str(&reports)])), 2);
}

#[test]
fn unknown_schema_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports.jsonl");
    normlab(&["verify", "--chain", "main", "--count", "1", "--out", path_str(&reports)]);
    let text = fs::read_to_string(&reports)
        .unwrap()
        .replace("\"schema_version\":1", "\"schema_version\":7");
    fs::write(&reports, text).unwrap();
    let out = normlab(&["show", "--in", path_str(&reports)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema version 7"));
}
