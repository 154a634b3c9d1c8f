use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use maxlip_verify::config::GridSpec;
use maxlip_verify::report::from_json;
use maxlip_verify::ScenarioConfig;

fn maxlip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxlip"))
        .args(args)
        .output()
        .expect("spawn maxlip")
}

fn small_config(dir: &Path) -> PathBuf {
    let cfg = ScenarioConfig {
        grids: vec![GridSpec::unit(1, 16)],
        refinement: vec![8, 16],
        ..ScenarioConfig::default()
    };
    let path = dir.join("small.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn version_flag() {
    let o = maxlip(&["--version"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn default_config_file_matches_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.json");
    assert_eq!(ScenarioConfig::load(&path).unwrap(), ScenarioConfig::default());
}

#[test]
fn verify_writes_a_parseable_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("r.json");
    let o = maxlip(&[
        "verify",
        "identities",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.scenario, "identities");
    assert!(report.passed());
    assert_eq!(report.summary.total, report.checks.len());
    assert!(String::from_utf8_lossy(&o.stderr).contains("identities:"));
}

#[test]
fn csv_report_has_header_and_one_row_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("r.csv");
    let o = maxlip(&[
        "verify",
        "counterexamples",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut rd = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        [
            "check_id",
            "anchor",
            "relation",
            "lhs",
            "rhs",
            "tolerance",
            "status",
            "witness"
        ]
    );
    let rows = rd.records().count();
    assert!(rows > 0);
}

#[test]
fn compute_function_and_scalar_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let grid_out = dir.path().join("hl.csv");
    let o = maxlip(&[
        "compute",
        "hl",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        grid_out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let grid = maxlip_core::Grid::unit(1, 16).unwrap();
    let f = maxlip_core::io::read_csv(grid, std::fs::File::open(&grid_out).unwrap()).unwrap();
    // f0 is the constant 1, so M f = 1.
    assert_eq!(f.values().len(), 16);
    assert!(f.values().iter().all(|v| (v - 1.0).abs() < 1e-12));

    let scalar_out = dir.path().join("lip.json");
    let o = maxlip(&[
        "compute",
        "lip-seminorm",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        scalar_out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&scalar_out).unwrap()).unwrap();
    // b0 = x on 16 cells: the supremum is attained by the most distant pair.
    let expected = (15.0f64 / 16.0).sqrt();
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!(v["witness"].as_str().unwrap().contains("cell"));
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"beta": 0.5, "betta": 0.4}"#).unwrap();
    let o = maxlip(&["verify", "lemmas", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("betta"));
}

#[test]
fn beta_out_of_range_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"beta": 1.5}"#).unwrap();
    let o = maxlip(&["verify", "lemmas", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_three() {
    let o = maxlip(&["verify", "lemmas", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_three_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = maxlip(&[
        "verify",
        "all",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/nonexistent/dir/r.json",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn invalid_thread_count_exits_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_maxlip"))
        .args(["verify", "lemmas"])
        .env("MAXLIP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
