//! End-to-end checks of the `mopass` binary: exit codes, artifacts, and
//! rerun determinism, driven through the bundled example configs.

use std::process::{Command, Output};

fn mopass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mopass"))
        .args(args)
        .output()
        .expect("failed to launch mopass")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process killed by signal")
}

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn solve_oned_cubic_produces_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cfg = config_path("oned_cubic.ini");
    let out = mopass(&["solve", "--config", &cfg, "--output", out_dir]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    for artifact in ["u_star.csv", "history.jsonl", "summary.json"] {
        assert!(dir.path().join(artifact).exists(), "missing {artifact}");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    for key in ["beta", "residual", "eta", "r", "iterations"] {
        assert!(summary.get(key).is_some(), "summary missing key {key}");
    }
    assert!(summary["beta"].as_f64().unwrap() > 0.0);
    assert!(summary["residual"].as_f64().unwrap() < 1e-6);

    // CSV: header plus one row per node; node index leads, then coordinate
    // and value as '.'-decimal floats.
    let csv = std::fs::read_to_string(dir.path().join("u_star.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,x,u"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 101);
    for (k, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 3, "row: {row}");
        assert_eq!(fields[0].parse::<usize>().unwrap(), k);
        for f in &fields[1..] {
            f.parse::<f64>().unwrap_or_else(|_| panic!("unparseable field {f}"));
        }
    }
}

#[test]
fn solve_zero_rhs_exits_with_geometry_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.ini");
    std::fs::write(&cfg, "[rhs]\nkind = zero\n").unwrap();
    let out = mopass(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("descent"), "probe not named: {err}");
}

#[test]
fn solve_with_single_iteration_reports_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.ini");
    std::fs::write(
        &cfg,
        "[grid]\nn = 65\n\n[mp]\nmax_iter = 1\npath_points = 12\nbump_center = 0.5 0\nbump_radius = 0.35\n\n[rhs]\nkind = pure_power\nq = 4\ntheta = 4\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = mopass(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    // Best-effort artifacts are still written.
    assert!(out_dir.join("u_star.csv").exists());
    assert!(out_dir.join("summary.json").exists());
}

#[test]
fn check_respects_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cfg = config_path("oned_cubic.ini");

    // g_sup = 2 is not below N = 1, so the exponent window fails.
    let out = mopass(&["check", "--config", &cfg, "--output", out_dir]);
    assert_eq!(code(&out), 1);
    assert!(dir.path().join("check_report.json").exists());

    let out = mopass(&["check", "--config", &cfg, "--output", out_dir, "--override-hypotheses"]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning"), "override must record warnings: {err}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("check_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["all_pass"], serde_json::Value::Bool(false));
    assert!(report["checks"].as_array().unwrap().len() >= 8);
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    std::fs::write(&cfg, "[phi]\np = fast\n").unwrap();
    let out = mopass(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("phi.p"), "offending key not named: {err}");
}

#[test]
fn unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("extra.ini");
    std::fs::write(&cfg, "[run]\nverbosity = 3\n").unwrap();
    let out = mopass(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.verbosity"));
}

#[test]
fn verify_reports_tally_and_rejects_unknown_suite() {
    let out = mopass(&["verify", "--suite", "norms", "--trials", "50", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("suite=norms"), "tally missing: {text}");
    assert!(text.contains("violations=0"));
    assert!(text.contains("PASS"));

    let out = mopass(&["verify", "--suite", "spectral"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_is_deterministic() {
    let a = mopass(&["verify", "--suite", "gradient", "--trials", "10", "--seed", "9"]);
    let b = mopass(&["verify", "--suite", "gradient", "--trials", "10", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "reruns must be bit-identical");
}

#[test]
fn oracle_writes_solution_and_flags_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cfg = config_path("oned_cubic.ini");
    let out = mopass(&["oracle", "--config", &cfg, "--output", out_dir]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("oracle.csv").exists());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap())
            .unwrap();
    let umax = meta["umax"].as_f64().unwrap();
    assert!((umax - 3.7081493546027438).abs() / 3.7081493546027438 < 1e-6);

    // q <= p: no positive solution to bracket.
    let cfg_qp = dir.path().join("qlep.ini");
    std::fs::write(
        &cfg_qp,
        "[phi]\nkind = constant_power\np = 4\n\n[rhs]\nkind = pure_power\nq = 3\ntheta = 3\n",
    )
    .unwrap();
    let out = mopass(&["oracle", "--config", cfg_qp.to_str().unwrap(), "--output", out_dir]);
    assert_eq!(code(&out), 5);

    // The oracle is one-dimensional.
    let cfg_2d = config_path("pxlap_2d.ini");
    let out = mopass(&["oracle", "--config", &cfg_2d, "--output", out_dir]);
    assert_eq!(code(&out), 2);
}
