use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crdisc::disc::DiscDoc;
use crdisc::model::ModelDoc;
use serde_json::Value;

fn crdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crdisc")).args(args).output().expect("binary runs")
}

fn run_config(dir: &Path, config: Value) -> Output {
    let path = dir.join("config.in.json");
    fs::write(&path, config.to_string()).unwrap();
    crdisc(&["run", "--config", path.to_str().unwrap()])
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "diagnostic must be one line: {text:?}");
    text.trim_end().to_string()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn help_exits_zero() {
    for args in [&["--help"][..], &["run", "--help"]] {
        let out = crdisc(args);
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn unknown_name_is_an_error_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("foo");
    let out = crdisc(&["run", "--name", "foo", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error: unknown-experiment: "));
    assert!(!out_dir.exists());
}

#[test]
fn invalid_config_lists_every_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_config(tmp.path(), serde_json::json!({"name": "eq103", "grid_N": 1000, "sector": {"alpha": 1.5}}));
    assert_eq!(out.status.code(), Some(2));
    let line = stderr_line(&out);
    assert!(line.starts_with("error: config: "), "{line}");
    assert!(line.contains("grid_N must be a power of two") && line.contains("alpha in (0,1)"), "{line}");
}

#[test]
fn solver_precondition_failure_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    // The derivative law needs three nonzero etas.
    let out = run_config(tmp.path(), serde_json::json!({"name": "eq103", "grid_N": 512, "etas": [0, 1e-3], "output_dir": out_dir}));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error: solver: "));
}

#[test]
fn dichotomy_passes_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("d");
    let out = crdisc(&["run", "--name", "dichotomy", "--k", "3", "--eps", "0.05", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out_dir);
    let keys: Vec<&str> = s.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["artifact_paths", "metrics", "name", "pass"]);
    assert_eq!(s["name"], "dichotomy");
    assert_eq!(s["pass"], true);
    let paths: Vec<&str> = s["artifact_paths"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(paths.iter().any(|p| p.ends_with("dichotomy.csv")));
    for p in paths {
        assert!(Path::new(p).exists(), "{p}");
    }
    for m in ["plus_pass", "minus_pass", "minus_boundary_min", "minus_vertex_block_min", "plus_min_response_ratio", "gamma_clamped"] {
        assert!(s["metrics"].get(m).is_some(), "missing metric {m}");
    }
}

#[test]
fn approximation_rate_table_format() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("a");
    let out = run_config(
        tmp.path(),
        serde_json::json!({"name": "approximation-rate", "grid_N": 1024, "nu_list": [8, 16, 32, 64, 128], "output_dir": out_dir}),
    );
    // The experiment runs; its pass rule is not met at these settings.
    assert!(matches!(out.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(out.status.code(), Some(if summary(&out_dir)["pass"] == true { 0 } else { 1 }));
    let csv = fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "nu,f_gap,c1gamma_gap,radial_gap,converged");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("8,") && lines[5].starts_with("128,"));
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for i in 0..2 {
        let d = tmp.path().join(format!("r{i}"));
        let out = run_config(tmp.path(), serde_json::json!({"name": "eq103", "grid_N": 1024, "seed": 11, "output_dir": d}));
        assert_eq!(out.status.code(), Some(0));
        dirs.push(d);
    }
    for f in ["eq103.csv", "eq103_vectors.csv"] {
        assert_eq!(fs::read(dirs[0].join(f)).unwrap(), fs::read(dirs[1].join(f)).unwrap(), "{f}");
    }
    assert_eq!(summary(&dirs[0])["metrics"], summary(&dirs[1])["metrics"]);
}

#[test]
fn sweep_table_header_and_rank() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("s");
    let out = crdisc(&["run", "--name", "sweep-rank", "--grid-n", "1024", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x0_1,w0_re,w0_im,r,z_re_1,z_im_1,w_re,w_im");
    // 3 samples per axis over (x0, Re w0, Im w0) and 3 radii.
    assert_eq!(lines.count(), 81);
    assert_eq!(summary(&d)["metrics"]["jacobian_rank"], 4.0);
}

#[test]
fn cached_disc_reloads_on_its_model() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("c");
    let out = run_config(
        tmp.path(),
        serde_json::json!({"name": "composition-regularity", "grid_N": 512, "sector": {"alpha": 0.4}, "output_dir": d}),
    );
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let cfg: Value = serde_json::from_str(&fs::read_to_string(d.join("config.json")).unwrap()).unwrap();
    let model: ModelDoc = serde_json::from_value(cfg["model"].clone()).unwrap();
    let doc = DiscDoc::from_json(&fs::read_to_string(d.join("disc.json")).unwrap()).unwrap();
    assert_eq!(doc.grid_N, 512);
    let disc = doc.into_disc(model.build().unwrap()).unwrap();
    let cert = disc.certificate();
    assert!(cert.attachment <= 1e-9 && cert.residual <= 1e-9, "{cert:?}");
}

#[test]
fn chain_accepts_a_model_document() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("ch");
    let model = serde_json::to_value(ModelDoc::coupled()).unwrap();
    let out = run_config(tmp.path(), serde_json::json!({"name": "chain-propagation", "grid_N": 512, "model": model, "output_dir": d}));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("chain.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "grid_N,link,phi,v_1,v_2");
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn flags_and_config_are_exclusive() {
    let out = crdisc(&["run", "--config", "x.json", "--name", "eq103"]);
    assert_eq!(out.status.code(), Some(2));
}
