//! Experiment configuration, read from and written as TOML.

use std::path::Path;

use junction_core::dynamics::{ControlSchedule, ProbeConfig, WavePacketSpec};
use junction_core::model::{build_system, SystemParams, SystemSpec};
use junction_core::observables::DEFAULT_PULSE_THRESHOLD;
use junction_core::scattering::DEFAULT_GRID;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub system: SystemParams,
    pub dynamics: Option<DynamicsConfig>,
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub outputs: OutputSelection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub packet: WavePacketSpec,
    pub schedule: ControlSchedule,
    /// Field switched off on `[t_off, t_on)` on top of `schedule`.
    pub pause: Option<PauseWindow>,
    #[serde(default)]
    pub probes: ProbeConfig,
}

pub fn default_dt() -> f64 {
    0.02
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauseWindow {
    pub t_off: f64,
    pub t_on: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub omegas: Vec<f64>,
    #[serde(default)]
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        let (lo, hi, points) = DEFAULT_GRID;
        Self { lo, hi, points }
    }
}

impl GridSpec {
    /// Parses `lo:hi:n`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || SimError::Invalid(format!("grid `{text}` is not lo:hi:n"));
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        let grid = GridSpec {
            lo: lo.trim().parse().map_err(|_| bad())?,
            hi: hi.trim().parse().map_err(|_| bad())?,
            points: n.trim().parse().map_err(|_| bad())?,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > -2.0 && self.hi < 2.0 && self.lo <= self.hi && self.points > 0) {
            return Err(SimError::Invalid(format!(
                "grid {}:{}:{} must lie strictly inside (-2, 2) with lo <= hi and n > 0",
                self.lo, self.hi, self.points
            )));
        }
        Ok(())
    }

    pub fn energies(&self) -> Vec<f64> {
        junction_core::scattering::energy_grid(self.lo, self.hi, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSelection {
    pub probabilities: bool,
    pub density_map: bool,
    pub occupation_map: bool,
    pub pulses: bool,
    pub spectrum: bool,
    /// Pulse detection threshold as a fraction of the channel peak.
    pub pulse_threshold: f64,
    /// Snapshot time used for the pulse report; the last snapshot if unset.
    pub pulse_time: Option<f64>,
}

impl Default for OutputSelection {
    fn default() -> Self {
        Self {
            probabilities: true,
            density_map: true,
            occupation_map: true,
            pulses: true,
            spectrum: true,
            pulse_threshold: DEFAULT_PULSE_THRESHOLD,
            pulse_time: None,
        }
    }
}

impl DynamicsConfig {
    /// Schedule with the pause window applied.
    pub fn effective_schedule(&self) -> Result<ControlSchedule> {
        Ok(match self.pause {
            Some(p) => self.schedule.with_pause(p.t_off, p.t_on)?,
            None => self.schedule.clone(),
        })
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        let config: Self = toml::from_str(&text).map_err(|source| SimError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|source| SimError::ConfigParse {
            path: "<inline>".into(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Canonical TOML form, embedded in the manifest.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn system_spec(&self) -> Result<SystemSpec> {
        Ok(build_system(self.system)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.system_spec()?;
        if self.dynamics.is_none() && self.spectrum.is_none() {
            return Err(SimError::Invalid(
                "config needs a [dynamics] or a [spectrum] section".into(),
            ));
        }
        if let Some(d) = &self.dynamics {
            if !(d.t_end > 0.0 && d.t_end.is_finite()) {
                return Err(SimError::Invalid("t_end must be positive".into()));
            }
            if !(d.dt > 0.0 && d.dt.is_finite()) {
                return Err(SimError::Invalid("dt must be positive".into()));
            }
            d.packet.validate()?;
            d.effective_schedule()?;
        }
        if let Some(s) = &self.spectrum {
            s.grid.validate()?;
            if s.omegas.iter().any(|w| !w.is_finite()) {
                return Err(SimError::Invalid("spectrum omegas must be finite".into()));
            }
        }
        let th = self.outputs.pulse_threshold;
        if !(th > 0.0 && th <= 1.0) {
            return Err(SimError::Invalid("pulse_threshold must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Parses `t0:v0,t1:v1,...` into a schedule.
pub fn parse_omega_schedule(text: &str) -> Result<ControlSchedule> {
    let bad = || SimError::Invalid(format!("omega schedule `{text}` is not t0:v0,t1:v1,..."));
    let mut segments = Vec::new();
    for pair in text.split(',') {
        let (t, v) = pair.split_once(':').ok_or_else(bad)?;
        let t: f64 = t.trim().parse().map_err(|_| bad())?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        segments.push((t, v));
    }
    Ok(ControlSchedule::from_segments(&segments)?)
}
