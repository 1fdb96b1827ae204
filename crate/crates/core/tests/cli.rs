use std::fs;
use std::path::Path;
use std::process::Command;
use thermolab::cli::{ExperimentConfig, ModeName};

const BIN: &str = env!("CARGO_BIN_EXE_thermolab");

fn run(dir: &Path, command: &str, config: &str, out: &str) -> std::process::Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    Command::new(BIN)
        .args([command, "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join(out))
        .output()
        .unwrap()
}

#[test]
fn config_round_trip_is_idempotent() {
    let text = r#"{"mode": "vortex", "m": 3, "seed_coefficients": [[1.0, 0.0]], "T": 50, "outputs": {"states": "s.csv"}}"#;
    let config = ExperimentConfig::from_json(text).unwrap();
    assert_eq!(config.mode, ModeName::Vortex);
    assert_eq!((config.mesh_h, config.dt, config.n_states), (0.05, 1e-2, 20));
    let canonical = config.to_json().unwrap();
    let again = ExperimentConfig::from_json(&canonical).unwrap();
    assert_eq!(again, config);
    assert_eq!(again.to_json().unwrap(), canonical);
    assert!(canonical.find("\"T\"").unwrap() < canonical.find("\"bump_spec\"").unwrap());
}

#[test]
fn config_rejections() {
    let err = ExperimentConfig::from_json(r#"{"mode": "vortex", "m": 1}"#).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("degree 1 is excluded"), "{err}");
    for bad in [
        r#"{"mode": "geodesic", "colour": 1}"#,
        r#"{"mode": "spiral"}"#,
        r#"{"mode": "geodesic", "dt": -1}"#,
        r#"{"mode": "geodesic", "surface": "klein"}"#,
        r#"{"mode": "geodesic", "outputs": {"plot": "a.png"}}"#,
        r#"{"mode": "geodesic", "outputs": {"states": "../a.csv"}}"#,
    ] {
        assert_eq!(ExperimentConfig::from_json(bad).unwrap_err().exit_code(), 2, "{bad}");
    }
}

#[test]
fn binary_reports_config_errors_with_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "solve", r#"{"mode": "vortex", "m": 1}"#, "o");
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("degree 1 is excluded"), "{stderr}");
    let out = run(dir.path(), "solve", r#"{"mode": "vortex", "m": 3, "typo": 0}"#, "o");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"mode": "vortex", "m": 3, "seed_coefficients": [[1.0, 0.0]], "mesh_h": 0.1, "T": 30, "n_states": 3, "rng_seed": 7}"#;
    for command in ["certify", "flatness", "scan"] {
        let a = run(dir.path(), command, config, &format!("{command}-a"));
        let b = run(dir.path(), command, config, &format!("{command}-b"));
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert!(b.status.success());
        let mut names: Vec<_> = fs::read_dir(dir.path().join(format!("{command}-a")))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(names.len() >= 2);
        for name in names {
            let x = fs::read(dir.path().join(format!("{command}-a")).join(&name)).unwrap();
            let y = fs::read(dir.path().join(format!("{command}-b")).join(&name)).unwrap();
            assert!(x == y, "{command}: {name:?} differs");
        }
    }
}

#[test]
fn output_names_can_be_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"mode": "geodesic", "T": 5, "n_states": 2, "outputs": {"trajectory": "path.csv", "manifest": "m.json"}}"#;
    let out = run(dir.path(), "orbit", config, "o");
    assert!(out.status.success());
    assert!(dir.path().join("o/path.csv").exists());
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/m.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "orbit");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn geodesic_lyapunov_exponent_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"mode": "geodesic", "T": 1000, "n_states": 1, "rng_seed": 3}"#;
    let out = run(dir.path(), "lyapunov", config, "o");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/states.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let column = header.iter().position(|h| *h == "lyap_plus").unwrap();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let plus: f64 = row[column].parse().unwrap();
    assert!((0.998..=1.002).contains(&plus), "{plus}");
}
