use std::fs;
use std::path::Path;
use std::process::Command;

use signsgd_bft::cli::csv::{check_summary_csv, check_trajectory_csv, Table};
use signsgd_bft::cli::{run_cli, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("signsgd-bft").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn toy_run_writes_500_rows_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"fleet": {"byzantine_count": 9}}"#);
    let out = tmp.path().join("out");
    let (code, _, err) = cli(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--check"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    check_trajectory_csv(&text, 500).unwrap();
    assert!(out.join("manifest.json").exists());
}

#[test]
fn manifest_round_trips_to_identical_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"iterations": 50, "fleet": {"byzantine_count": 4, "attack": "blind_flip"}}"#);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(cli(&["run", "--config", &config, "--seed", "42", "--out", a.to_str().unwrap()]).0, EXIT_OK);
    let manifest = a.join("manifest.json");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["master_seed"], 42);
    assert_eq!(m["provenance"]["tool"], "signsgd-bft");
    assert_eq!(cli(&["run", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]).0, EXIT_OK);
    assert_eq!(fs::read(a.join("trajectory.csv")).unwrap(), fs::read(b.join("trajectory.csv")).unwrap());
}

#[test]
fn unknown_key_exits_2_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"learning_rat": 0.5}"#);
    let (code, _, err) = cli(&["run", "--config", &config, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("learning_rat"), "{err}");
    let nested = write(tmp.path(), "n.json", r#"{"fleet": {"adversaries": 3}}"#);
    let (code, _, err) = cli(&["run", "--config", &nested]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("adversaries"), "{err}");
}

#[test]
fn malformed_json_and_missing_file_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", "{ not json");
    assert_eq!(cli(&["run", "--config", &config]).0, EXIT_USAGE);
    assert_eq!(cli(&["run", "--config", "/nonexistent/c.json"]).0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(cli(&["--threads", "0", "bounds", "--q", "9", "--alpha", "0", "--p", "0.8"]).0, EXIT_USAGE);
}

#[test]
fn majority_adversaries_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"fleet": {"q": 27, "byzantine_count": 27}}"#);
    let out = tmp.path().join("out");
    let (code, _, err) = cli(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_INFEASIBLE);
    assert!(err.contains("byzantine_count < q"), "{err}");
    assert!(!out.join("trajectory.csv").exists());
}

#[test]
fn bounds_reports_both_rate_forms() {
    let (code, out, _) = cli(&["bounds", "--q", "27", "--alpha", "0", "--p", "0.9"]);
    assert_eq!(code, EXIT_OK);
    let t = Table::parse(&out).unwrap();
    assert_eq!(t.rows.len(), 1);
    let bound = t.reals("vote_failure_bound").unwrap()[0];
    assert!((bound - 0.07217).abs() < 1e-5, "{bound}");
    assert!(t.reals("rate_rhs_proof_form").unwrap()[0] < t.reals("rate_rhs_statement_form").unwrap()[0]);

    let (_, out, _) = cli(&["bounds", "--q", "27", "--alpha", "0", "--p", "1"]);
    let t = Table::parse(&out).unwrap();
    assert_eq!(t.reals("alpha_threshold").unwrap()[0], 0.5);

    let (code, _, err) = cli(&["bounds", "--q", "27", "--alpha", "0", "--p", "0.5"]);
    assert_eq!(code, EXIT_INFEASIBLE);
    assert!(err.contains("p > 1/2"));
    let (code, _, err) = cli(&["bounds", "--q", "27", "--alpha", "0.5", "--p", "0.9"]);
    assert_eq!(code, EXIT_INFEASIBLE);
    assert!(err.contains("alpha < 1 - 1/(2p)"));

    let (code, out, _) = cli(&["bounds", "--q", "9", "--alpha", "1/3", "--p", "0.8", "--s", "1", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("vacuous"), "{out}");
    assert!(out.contains("SNR form"));
}

#[test]
fn verify_vote_spot_point() {
    let (code, out, _) = cli(&["verify", "--suite", "vote", "--q", "9", "--alpha", "1/3", "--p", "0.8", "--trials", "50000"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("vacuous"));
    assert!(out.contains("exact=0.344640"));
}

#[test]
fn verify_appendix_and_lemma1() {
    let (code, out, _) = cli(&["verify", "--suite", "appendix"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("0.416667"));
    let (code, out, _) = cli(&["verify", "--suite", "lemma1", "--samples", "20000"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS lemma1")).count(), 15);
}

#[test]
fn sweep_figure_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"iterations": 40}"#);
    let out = tmp.path().join("fig");
    let (code, _, err) = cli(&[
        "sweep",
        "--config",
        &config,
        "--axis",
        "byzantine_count",
        "--values",
        "0,9,13",
        "--panel-axis",
        "batch_size",
        "--panel-values",
        "1,500",
        "--out",
        out.to_str().unwrap(),
        "--check",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let svg = fs::read_to_string(out.join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<?xml") || svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 6);
    assert!(svg.contains("batch_size=1") && svg.contains("batch_size=500"));
    for panel in ["batch_size-1", "batch_size-500"] {
        let summary = fs::read_to_string(out.join(panel).join("summary.csv")).unwrap();
        check_summary_csv(&summary, 3).unwrap();
        for b in [0, 9, 13] {
            assert!(out.join(panel).join("runs").join(format!("byzantine_count-{b}_r0.csv")).exists());
        }
    }
}

#[test]
fn sweep_repeats_get_distinct_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"iterations": 10}"#);
    let out = tmp.path().join("s");
    let args = ["sweep", "--config", &config, "--axis", "attack", "--values", "omniscient_optimal,blind_flip", "--repeats", "3", "--svg", "off", "--out", out.to_str().unwrap()];
    assert_eq!(cli(&args).0, EXIT_OK);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    check_summary_csv(&summary, 6).unwrap();
    let t = Table::parse(&summary).unwrap();
    let seed = t.column("seed").unwrap();
    let seeds: std::collections::BTreeSet<&str> = t.rows.iter().map(|r| r[seed].as_str()).collect();
    assert_eq!(seeds.len(), 3);
    assert!(!out.join("sweep.svg").exists());

    let first = fs::read(out.join("summary.csv")).unwrap();
    assert_eq!(cli(&args).0, EXIT_OK);
    assert_eq!(fs::read(out.join("summary.csv")).unwrap(), first);
}

#[test]
fn sweep_with_some_infeasible_points_still_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write(tmp.path(), "c.json", r#"{"iterations": 5, "fleet": {"q": 9}}"#);
    let out = tmp.path().join("s");
    let (code, _, err) = cli(&["sweep", "--config", &config, "--axis", "byzantine_count", "--values", "2,9", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"), "{err}");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(2).unwrap().contains("nan"));
    let (code, _, _) = cli(&["sweep", "--config", &config, "--axis", "byzantine_count", "--values", "9,10", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_INFEASIBLE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_signsgd-bft");
    let output = Command::new(bin).args(["bounds", "--q", "27", "--alpha", "0", "--p", "0.5"]).output().unwrap();
    assert_eq!(output.status.code(), Some(EXIT_INFEASIBLE));
    assert!(String::from_utf8_lossy(&output.stderr).contains("p > 1/2"));
    let output = Command::new(bin).args(["bounds", "--q", "27", "--alpha", "0", "--p", "0.9"]).output().unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).starts_with("q,alpha,p"));
    let tmp = tempfile::tempdir().unwrap();
    let output = Command::new(bin)
        .args(["run", "--seed", "1"])
        .env("SIGNSGD_BFT_OUT_DIR", tmp.path())
        .current_dir(tmp.path())
        .args(["--config"])
        .arg(write(tmp.path(), "c.json", r#"{"iterations": 3}"#))
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(tmp.path().join("trajectory.csv").exists());
}
