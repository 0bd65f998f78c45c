use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dnstrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnstrip"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_scenario(dir: &Path, c: f64, half_length: f64) -> String {
    let path = dir.join(format!("c{c}-L{half_length}.json"));
    let json = format!(
        r#"{{
  "schema_version": 1,
  "name": "small",
  "geometry": {{ "d": 1.0, "profile": {{ "kind": "poly_bump", "c": {c}, "s0": 2.0 }} }},
  "truncation": {{ "L": {half_length}, "trunc_bc": "both" }},
  "grid": {{ "ns": 48, "nu": 8, "refine_levels": 1 }},
  "tasks": ["solve", "certify"]
}}"#
    );
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn dump_preset_round_trips_through_config() {
    let out = dnstrip(&["--dump-preset", "counterexample"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let sc = dnstrip::scenario::Scenario::from_json(&text).unwrap();
    assert_eq!(sc, dnstrip::scenario::preset("counterexample").unwrap());
}

#[test]
fn solve_writes_the_artifact_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scenario(dir.path(), 0.3, 6.0);
    let out_dir = dir.path().join("run");
    let out = dnstrip(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "report.json",
        "metadata.json",
        "eigenvalues.csv",
        "eigenvalues_neumann.csv",
        "modes.csv",
        "convergence.csv",
        "certificate.json",
    ] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let header = |f: &str| fs::read_to_string(out_dir.join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header("eigenvalues.csv"), "index,lambda,residual,below_threshold");
    assert_eq!(header("modes.csv"), "s,u,value");
    assert_eq!(header("convergence.csv"), "trunc_bc,ns,nu,hs,hu,lambda1,residual,observed_order");

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let bound = &report["verdicts"]["bound_state"];
    assert!(bound["margin"].as_f64().unwrap() > 0.0);
    assert!(bound["fine_grid"].is_array());
    assert!(report.to_string().find("started").is_none());

    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("certificate.json")).unwrap()).unwrap();
    for key in ["kind", "sigma", "epsilon", "q_value", "upper_bound_on_inf_spectrum", "norms", "schema_version"] {
        assert!(cert.get(key).is_some(), "certificate lacks {key}");
    }
    assert!(cert["q_value"].as_f64().unwrap() < 0.0);
}

#[test]
fn strict_flag_turns_inconclusive_into_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scenario(dir.path(), 0.1, 3.0);
    let out_dir = dir.path().join("run");
    let relaxed = dnstrip(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(relaxed.status.code(), Some(0));
    let stdout = String::from_utf8(relaxed.stdout).unwrap();
    assert!(stdout.contains("inconclusive"), "{stdout}");
    let strict = dnstrip(&["--strict", "solve", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn transverse_emits_table_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("t");
    let out = dnstrip(&["transverse", "--preset", "prop3_bend", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("transverse.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d,gamma,lambda0,method,residual"));
    assert!(lines.count() > 10);
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("transverse.json")).unwrap()).unwrap();
    assert_eq!(cert["all_pass"], true);
    assert!(cert["samples"][0].get("sufficient_condition_rhs").is_some());
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scenario(dir.path(), 0.3, 6.0);
    let out_dir = dir.path().join("sweep");
    let out = dnstrip(&["--jobs", "1", "sweep", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "c,d,s0,total_bending,threshold,lambda1_dirichlet,lambda1_neumann,margin,verdict,certificate_q"
    );
    assert_eq!(lines.len(), 5);
}

#[test]
fn validate_passes_filters_and_catches_corruption() {
    let all = dnstrip(&["validate"]);
    assert!(all.status.success(), "{}", String::from_utf8_lossy(&all.stdout));

    let lemma = dnstrip(&["validate", "--filter", "lemma"]);
    assert!(lemma.status.success());
    let text = String::from_utf8(lemma.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.contains("  pass  ") || l.contains("  FAIL  ")).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.starts_with("lemma.")), "{text}");

    let bad = dnstrip(&["validate", "--corrupt-bessel-table"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("bessel.zero_table"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"schema_version":1,"name":"x","geometry":{"d":1.0,"profile":{"kind":"poly_bump","c":0.3,"s0":2.0}},
            "truncation":{"L":8.0,"trunc_bc":"periodic"},"grid":{"ns":64,"nu":8}}"#,
    )
    .unwrap();
    let out = dnstrip(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("truncation.trunc_bc"), "{err}");
    assert!(err.contains("dirichlet") && err.contains("neumann") && err.contains("both"), "{err}");

    let unknown = dnstrip(&["solve", "--preset", "nope"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8(unknown.stderr).unwrap().contains("prop1_bend"));
}

#[test]
fn invalid_geometry_is_rejected_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.json");
    fs::write(
        &path,
        r#"{"schema_version":1,"name":"wide","geometry":{"d":4.0,"profile":{"kind":"poly_bump","c":-0.3,"s0":2.0}},
            "truncation":{"L":20.0,"trunc_bc":"both"},"grid":{"ns":64,"nu":8}}"#,
    )
    .unwrap();
    let out = dnstrip(&["solve", "--config", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("o").exists());
}
