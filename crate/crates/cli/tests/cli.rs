use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stochastic-contact"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn reference_config_writes_both_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["simulate", "--model", "damped-oscillator-additive", "--seed", "4"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for scheme in ["contact", "em"] {
        let csv = dir.path().join(format!("trajectory_{scheme}.csv"));
        assert_eq!(data_rows(&csv), 201);
    }
    let header = fs::read_to_string(dir.path().join("trajectory_em.csv")).unwrap();
    assert!(header.starts_with("t,q1,p1,s,lambda,dW1\n"));
    let first = header.lines().nth(1).unwrap();
    assert_eq!(first.split(',').nth(4), Some(""), "EM rows leave lambda empty");
}

#[test]
fn single_step_writes_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--steps", "1", "--scheme", "contact"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&dir.path().join("trajectory_contact.csv")), 2);
    assert!(!dir.path().join("trajectory_em.csv").exists());
}

#[test]
fn unknown_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--model", "pendulum"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    for name in ["damped-oscillator-additive", "damped-multiplicative", "kepler-drag"] {
        assert!(msg.contains(name), "{msg}");
    }
}

#[test]
fn conflicting_final_time_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["simulate", "--steps", "10", "--T", "2"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", "--steps", "20", "--T", "2"], dir.path())
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn bad_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"alpah": 0.1}"#).unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        &["simulate", "--config", "/nonexistent/cfg.json"],
        &dir.path().join("o"),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"model": "damped-multiplicative", "steps": 7, "seed": 1, "scheme": "em"}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--steps", "5"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&out.join("trajectory_em.csv")), 6);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["config"]["model"], "damped-multiplicative");
    assert_eq!(m["config"]["steps"], 5);
}

#[test]
fn failed_integration_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["simulate", "--model", "kepler-drag", "--scheme", "contact"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    let rows = data_rows(&dir.path().join("trajectory_contact.csv"));
    assert!((2..2001).contains(&rows), "{rows}");
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["integration_failed"], true);
    assert!(m["failures"][0].as_str().unwrap().contains("no solution"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--model",
        "damped-multiplicative",
        "--seed",
        "11",
        "--ensemble",
        "2",
    ];
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    assert_eq!(run(&args, b.path()).status.code(), Some(0));
    let files = |m: &Value| m["files"].clone();
    assert_eq!(
        files(&json(&a.path().join("manifest.json"))),
        files(&json(&b.path().join("manifest.json")))
    );
    for name in [
        "trajectory_contact_seed11.csv",
        "trajectory_em_seed12.csv",
        "noise_seed12.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn manifest_lists_every_file_with_its_checksum() {
    for cmd in ["simulate", "diagnose", "converge", "criticality"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(&[cmd, "--steps", "20", "--paths", "3", "--levels", "2"], dir.path());
        assert_eq!(
            o.status.code(),
            Some(0),
            "{cmd}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let m = json(&dir.path().join("manifest.json"));
        let listed: Vec<(String, String)> = m["files"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| {
                (
                    f["path"].as_str().unwrap().to_string(),
                    f["sha256"].as_str().unwrap().to_string(),
                )
            })
            .collect();
        let mut on_disk: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != "manifest.json")
            .collect();
        on_disk.sort();
        let mut names: Vec<String> = listed.iter().map(|(n, _)| n.clone()).collect();
        names.sort();
        assert_eq!(names, on_disk, "{cmd}");
        for (name, sha) in listed {
            let digest = format!("{:x}", Sha256::digest(fs::read(dir.path().join(&name)).unwrap()));
            assert_eq!(digest, sha, "{cmd}/{name}");
        }
        assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
        assert!(m["solver"]["total_newton_iters"].is_u64());
    }
}

#[test]
fn diagnose_separates_the_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["diagnose", "--seed", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let d = json(&dir.path().join("diagnose.json"));
    let contact = &d["runs"][0];
    let em = &d["runs"][1];
    assert_eq!(contact["scheme"], "contact");
    assert_eq!(contact["contact_check"]["status"], "pass");
    assert!(contact["contact_check"]["max_residual"].as_f64().unwrap() <= 1e-6);
    assert!(contact["contact_check"]["max_residual_analytic"].as_f64().unwrap() <= 1e-10);
    assert_eq!(contact["conformal"]["lambda_min"], 0.99);
    assert_eq!(contact["conformal"]["lambda_max"], 0.99);
    assert_eq!(em["contact_check"]["status"], "fail");
    assert!(em["contact_check"]["max_residual"].as_f64().unwrap() > 1e-3);
    assert_eq!(em["contact_check"]["lambda_fitted"], true);
    let lambdas = fs::read_to_string(dir.path().join("lambda_contact.csv")).unwrap();
    assert!(lambdas.starts_with("j,t,lambda,ref_continuous,ref_discrete,ref_nominal\n"));
    assert_eq!(lambdas.lines().count(), 201);
}

#[test]
fn multiplicative_model_reports_both_references() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["diagnose", "--model", "damped-multiplicative", "--scheme", "contact"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let d = json(&dir.path().join("diagnose.json"));
    let refs = &d["runs"][0]["conformal"]["references"];
    let cont = refs["continuous"]["max_abs_diff"].as_f64().unwrap();
    let nominal = refs["nominal"]["max_abs_diff"].as_f64().unwrap();
    assert!(cont.is_finite() && nominal.is_finite());
    assert_ne!(cont, nominal);
}

#[test]
fn deterministic_runs_have_zero_noise_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["diagnose", "--deterministic", "--steps", "10", "--scheme", "contact"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let noisy = tempfile::tempdir().unwrap();
    run(&["diagnose", "--steps", "10", "--scheme", "contact"], noisy.path());
    let header = |p: &Path| fs::read_to_string(p).unwrap().lines().next().unwrap().to_string();
    for f in ["residuals_contact.csv", "lambda_contact.csv"] {
        assert_eq!(header(&dir.path().join(f)), header(&noisy.path().join(f)));
    }
    let sim = tempfile::tempdir().unwrap();
    run(&["simulate", "--deterministic", "--steps", "10"], sim.path());
    let text = fs::read_to_string(sim.path().join("trajectory_contact.csv")).unwrap();
    for line in text.lines().skip(1).take(10) {
        assert_eq!(line.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn criticality_index_bounds() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["criticality", "--steps", "20", "--index", "0"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["criticality", "--steps", "20", "--index", "20"], dir.path())
            .status
            .code(),
        Some(2)
    );
    let o = run(
        &["criticality", "--steps", "20", "--index", "7", "--scheme", "contact"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&dir.path().join("criticality_contact.csv")), 1);
}

#[test]
fn criticality_holds_for_contact_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["criticality", "--steps", "20", "--seed", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let d = json(&dir.path().join("criticality.json"));
    assert_eq!(d["runs"][0]["status"], "pass");
    assert!(d["runs"][0]["max_residual"].as_f64().unwrap() <= 1e-5);
    assert_eq!(d["runs"][1]["status"], "fail");
    assert!(d["runs"][1]["max_residual"].as_f64().unwrap() >= 1e-3);
    assert_eq!(data_rows(&dir.path().join("criticality_contact.csv")), 19);
}

#[test]
fn convergence_single_level_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["converge", "--levels", "1", "--paths", "2", "--scheme", "contact"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let d = json(&dir.path().join("converge.json"));
    let rows = d["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["error"], 0.0);

    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["converge", "--levels", "4", "--paths", "5", "--scheme", "contact"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let d = json(&dir.path().join("converge.json"));
    assert!(d["tables"][0]["slope"].as_f64().unwrap().is_finite());
    assert_eq!(d["tables"][0]["strictly_decreasing"], true);
}
