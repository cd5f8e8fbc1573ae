use std::fs;
use std::path::Path;

use junction_sim::artifacts::{PROBABILITY_HEADER, SPECTRUM_HEADER};
use junction_sim::{run_experiment, ExperimentConfig};
use sha2::{Digest, Sha256};

const SMALL: &str = r#"
name = "small"

[system]
n_channel = 120
n_atoms = 3
g = 0.5

[dynamics]
t_end = 60.0
dt = 0.05
packet = { n0 = -60.0, k0 = 1.3284, sigma = 12.0 }
schedule = { breakpoints = [20.0], values = [0.5, 0.2] }
pause = { t_off = 30.0, t_on = 40.0 }

[dynamics.probes]
record_interval = 1.0
snapshot_interval = 10.0

[spectrum]
omegas = [0.0, 0.5]
grid = { lo = -1.5, hi = 1.5, points = 31 }
"#;

fn small() -> ExperimentConfig {
    ExperimentConfig::from_toml(SMALL).unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&small(), a.path()).unwrap();
    run_experiment(&small(), b.path()).unwrap();
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert_eq!(fa.len(), 10);
    assert_eq!(fa, fb);
}

#[test]
fn manifest_checksums_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let (_, files) = run_experiment(&small(), dir.path()).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    let listed = manifest["files"].as_array().unwrap();
    assert_eq!(listed.len(), files.len());
    for entry in listed {
        let bytes = fs::read(dir.path().join(entry["path"].as_str().unwrap())).unwrap();
        assert_eq!(entry["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(entry["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let embedded = ExperimentConfig::from_toml(manifest["config"].as_str().unwrap()).unwrap();
    assert_eq!(embedded, small());
}

#[test]
fn tables_have_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (run, _) = run_experiment(&small(), dir.path()).unwrap();

    let probs = fs::read_to_string(dir.path().join("probabilities.csv")).unwrap();
    let mut lines = probs.lines();
    assert_eq!(lines.next(), Some(PROBABILITY_HEADER));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 61);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[60][0], 60.0);
    for r in &rows {
        assert_eq!(r.len(), 8);
        let sum: f64 = r[1..7].iter().sum();
        assert!((sum - r[7]).abs() < 1e-12);
        assert!((r[7] - 1.0).abs() < 1e-8);
    }

    for omega in ["0.0", "0.5"] {
        let text = fs::read_to_string(dir.path().join(format!("spectrum_omega_{omega}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SPECTRUM_HEADER));
        assert_eq!(lines.count(), 31);
    }
    assert_eq!(run.spectra.len(), 2);
}

#[test]
fn binary_maps_match_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let (run, _) = run_experiment(&small(), dir.path()).unwrap();
    let traj = &run.dynamics.as_ref().unwrap().trajectory;

    for (stem, rows) in [("density_map", traj.snapshots.len()), ("occupation_map", traj.times.len())] {
        let meta: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join(format!("{stem}.json"))).unwrap()).unwrap();
        let shape: Vec<usize> = meta["shape"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
        assert_eq!(shape[0], rows);
        assert_eq!(meta["times"].as_array().unwrap().len(), rows);
        let bytes = fs::read(dir.path().join(format!("{stem}.f64"))).unwrap();
        assert_eq!(bytes.len(), shape[0] * shape[1] * 8);
    }

    // First snapshot row is the initial packet density on guide A.
    let bytes = fs::read(dir.path().join("density_map.f64")).unwrap();
    let cols = 2 * run.system.sites_per_guide();
    let row0: Vec<f64> = bytes[..cols * 8]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(row0[..cols / 2], traj.snapshots[0].alpha[..]);
    assert!(row0[cols / 2..].iter().all(|&x| x == 0.0));
}

#[test]
fn pause_freezes_storage_in_runner() {
    let run = junction_sim::simulate(&small()).unwrap();
    let traj = &run.dynamics.unwrap().trajectory;
    let at = |t: f64| traj.times.iter().position(|&x| x == t).unwrap();
    let (i0, i1) = (at(30.0), at(40.0));
    for j in 0..3 {
        let s0 = traj.occupations[i0][j].storage;
        for occ in &traj.occupations[i0..=i1] {
            assert!((occ[j].storage.sqrt() - s0.sqrt()).abs() <= 1e-12);
        }
    }
    assert_eq!(traj.omegas[at(35.0)], 0.0);
    assert_eq!(traj.omegas[at(45.0)], 0.2);
}
