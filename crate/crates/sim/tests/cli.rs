use std::fs;
use std::process::Command;

fn junction() -> Command {
    Command::new(env!("CARGO_BIN_EXE_junction"))
}

#[test]
fn lists_presets() {
    let out = junction().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(names, junction_sim::presets::PRESET_NAMES);
}

#[test]
fn unknown_preset_fails_with_names() {
    let out = junction().args(["run", "--preset", "bogus"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bogus") && err.contains("delay_storage_12"), "{err}");
}

#[test]
fn spectrum_prints_csv() {
    let out = junction()
        .args(["spectrum", "--omega", "0.5", "--grid", "-0.5:0.5:3", "--n-atoms", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], junction_sim::artifacts::SPECTRUM_HEADER);
    assert_eq!(lines.len(), 4);
    // E = Ω is the exact quarter point.
    let row: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
    for p in &row[2..6] {
        assert!((p - 0.25).abs() < 1e-10);
    }
}

#[test]
fn run_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.toml");
    fs::write(
        &config,
        r#"
name = "tiny"
[system]
n_channel = 60
n_atoms = 2
g = 0.5
[dynamics]
t_end = 100.0
packet = { n0 = -30.0, k0 = 1.5, sigma = 6.0 }
schedule = { values = [0.3] }
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = junction()
        .arg("run")
        .arg(&config)
        .args(["--t-end", "10", "--dt", "0.05", "--omega-schedule", "0:0.3,5:0"])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    let cfg = junction_sim::ExperimentConfig::from_toml(manifest["config"].as_str().unwrap()).unwrap();
    let d = cfg.dynamics.unwrap();
    assert_eq!((d.t_end, d.dt), (10.0, 0.05));
    assert_eq!(d.schedule.values(), &[0.3, 0.0]);
    let csv = fs::read_to_string(out_dir.join("probabilities.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn misaligned_step_is_an_error() {
    let out = junction()
        .args(["run", "--preset", "routing_off", "--dt", "0.03", "--t-end", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
