//! Writes a [`RunOutput`] to disk: CSV tables, binary maps with JSON
//! sidecars, JSON reports and a checksummed manifest.
//!
//! Every file is a pure function of the run, so two runs of the same config
//! produce byte-identical directories.

use std::fs;
use std::path::Path;

use junction_core::dynamics::Diagnostic;
use junction_core::model::{Region, SystemSpec};
use junction_core::observables::{ProbabilitySummary, VelocityFit};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};
use crate::runner::{DynamicsOutput, RunOutput, SpectrumOutput};

pub const PROBABILITY_HEADER: &str = "t,P_AL,P_AR,P_BL,P_BR,P_C,P_Cwg,norm";
pub const SPECTRUM_HEADER: &str = "E,k,T_AR,T_BR,R_AL,R_BL,unitarity_defect";

const UNITS: &str = "hbar = 1, waveguide hopping J = 1, lattice spacing = 1; \
times in 1/J, energies and rates in J, positions in sites";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Writes all artifacts into `dir` (created if missing) and returns the
/// manifest entries.
pub fn write_outputs(run: &RunOutput, dir: &Path) -> Result<Vec<FileEntry>> {
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let mut files = Vec::new();
    let outputs = run.config.outputs;
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(&name);
        fs::write(&path, &bytes).map_err(|e| SimError::io(&path, e))?;
        files.push(FileEntry {
            path: name,
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    };

    if let Some(d) = &run.dynamics {
        if outputs.probabilities {
            put("probabilities.csv".into(), probabilities_csv(d).into_bytes())?;
        }
        if outputs.density_map && !d.trajectory.snapshots.is_empty() {
            let (data, sidecar) = density_map(d, &run.system);
            put("density_map.f64".into(), data)?;
            put("density_map.json".into(), to_json(&sidecar)?)?;
        }
        if outputs.occupation_map && !d.trajectory.occupations.is_empty() {
            let (data, sidecar) = occupation_map(d, &run.system);
            put("occupation_map.f64".into(), data)?;
            put("occupation_map.json".into(), to_json(&sidecar)?)?;
        }
        if let Some(p) = &d.pulses {
            put("pulses.json".into(), to_json(p)?)?;
        }
    }
    if outputs.spectrum {
        for s in &run.spectra {
            put(spectrum_file_name(s.omega), spectrum_csv(s).into_bytes())?;
        }
    }
    put("summary.json".into(), to_json(&summary(run))?)?;

    files.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = json!({
        "name": run.config.name,
        "generator": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        "units": UNITS,
        "config": run.config.to_toml()?,
        "files": files,
    });
    let path = dir.join("manifest.json");
    fs::write(&path, to_json(&manifest)?).map_err(|e| SimError::io(&path, e))?;
    Ok(files)
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn spectrum_file_name(omega: f64) -> String {
    format!("spectrum_omega_{omega:?}.csv")
}

fn csv_table<const N: usize>(header: &str, rows: impl Iterator<Item = [f64; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for row in rows {
        w.serialize(row.as_slice()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("ascii output")
}

pub fn probabilities_csv(d: &DynamicsOutput) -> String {
    let t = &d.trajectory;
    let rows = t
        .times
        .iter()
        .zip(&t.probabilities)
        .zip(&t.norms)
        .map(|((&time, p), &norm)| [time, p.p_al, p.p_ar, p.p_bl, p.p_br, p.p_c, p.p_cwg, norm]);
    csv_table(PROBABILITY_HEADER, rows)
}

pub fn spectrum_csv(s: &SpectrumOutput) -> String {
    let rows = s.rows.iter().map(|r| {
        [r.energy, r.k, r.t_ar, r.t_br, r.r_al, r.r_bl, r.unitarity_defect()]
    });
    csv_table(SPECTRUM_HEADER, rows)
}

fn le_bytes(values: impl Iterator<Item = f64>) -> Vec<u8> {
    values.flat_map(f64::to_le_bytes).collect()
}

/// Rows are snapshot times; columns run over guide A then guide B, each
/// from the leftmost site to the rightmost.
fn density_map(d: &DynamicsOutput, system: &SystemSpec) -> (Vec<u8>, serde_json::Value) {
    let snaps = &d.trajectory.snapshots;
    let per_guide = system.sites_per_guide();
    let data = le_bytes(
        snaps
            .iter()
            .flat_map(|s| s.alpha.iter().chain(&s.beta).copied()),
    );
    let columns: Vec<_> = Region::ALL
        .iter()
        .map(|&r| {
            let guide_offset = match r.waveguide() {
                junction_core::model::Waveguide::A => 0,
                junction_core::model::Waveguide::B => per_guide,
            };
            let cols = system.region_offsets(r);
            let sites = system.region_sites(r);
            json!({
                "region": r.label(),
                "start": guide_offset + cols.start,
                "stop": guide_offset + cols.end,
                "first_site": sites.start(),
                "last_site": sites.end(),
            })
        })
        .collect();
    let sidecar = json!({
        "quantity": "site density |amplitude|^2",
        "dtype": "f64",
        "byte_order": "little",
        "layout": "row-major",
        "shape": [snaps.len(), 2 * per_guide],
        "times": snaps.iter().map(|s| s.t).collect::<Vec<_>>(),
        "columns": columns,
    });
    (data, sidecar)
}

/// Rows are record times; columns are `|u_j|²` for j = 1..N_a followed by
/// `|v_j|²`.
fn occupation_map(d: &DynamicsOutput, system: &SystemSpec) -> (Vec<u8>, serde_json::Value) {
    let t = &d.trajectory;
    let na = system.n_atoms();
    let data = le_bytes(t.occupations.iter().flat_map(|row| {
        row.iter()
            .map(|o| o.excited)
            .chain(row.iter().map(|o| o.storage))
    }));
    let sidecar = json!({
        "quantity": "atomic occupation",
        "dtype": "f64",
        "byte_order": "little",
        "layout": "row-major",
        "shape": [t.occupations.len(), 2 * na],
        "times": t.times,
        "columns": [
            { "field": "excited |u_j|^2", "start": 0, "stop": na, "first_atom": 1 },
            { "field": "storage |v_j|^2", "start": na, "stop": 2 * na, "first_atom": 1 },
        ],
    });
    (data, sidecar)
}

#[derive(Serialize)]
struct Summary<'a> {
    name: &'a str,
    dimension: usize,
    dynamics: Option<DynamicsSummary<'a>>,
    spectra: Vec<SpectrumSummary>,
}

#[derive(Serialize)]
struct DynamicsSummary<'a> {
    t_end: f64,
    steps: u64,
    records: usize,
    snapshots: usize,
    final_probabilities: ProbabilitySummary,
    max_norm_drift: f64,
    diagnostics: &'a [Diagnostic],
    velocity_fit: Option<VelocityFit>,
    delays: Vec<(&'static str, f64)>,
}

#[derive(Serialize)]
struct SpectrumSummary {
    omega: f64,
    points: usize,
    max_unitarity_defect: f64,
}

fn summary(run: &RunOutput) -> Summary<'_> {
    let dynamics = run.dynamics.as_ref().map(|d| {
        let cfg = run.config.dynamics.as_ref().expect("dynamics output implies config");
        let t = &d.trajectory;
        DynamicsSummary {
            t_end: cfg.t_end,
            steps: (cfg.t_end / cfg.dt).round() as u64,
            records: t.times.len(),
            snapshots: t.snapshots.len(),
            final_probabilities: t.probabilities.last().copied().unwrap_or_default(),
            max_norm_drift: t.max_norm_drift,
            diagnostics: &d.diagnostics,
            velocity_fit: d.velocity,
            delays: d
                .pulses
                .iter()
                .flat_map(|p| &p.channels)
                .filter_map(|c| c.delay.map(|x| (c.region, x)))
                .collect(),
        }
    });
    Summary {
        name: &run.config.name,
        dimension: run.system.dimension(),
        dynamics,
        spectra: run
            .spectra
            .iter()
            .map(|s| SpectrumSummary {
                omega: s.omega,
                points: s.rows.len(),
                max_unitarity_defect: s
                    .rows
                    .iter()
                    .map(|r| r.unitarity_defect())
                    .fold(0.0, f64::max),
            })
            .collect(),
    }
}
