//! Runs an experiment config: time evolution, pulse analysis and spectra.

use junction_core::dynamics::{make_gaussian_packet, propagate, Diagnostic, Trajectory};
use junction_core::model::{Region, SystemSpec};
use junction_core::observables::{
    classify_pulses, detect_region_pulses, estimate_in_junction_velocity, pulse_delay, PulseClass,
    PulseEvent, VelocityFit,
};
use junction_core::scattering::ScatteringResult;
use log::warn;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Result, SimError};
use crate::spectrum::spectrum;

/// Everything an experiment produced, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub system: SystemSpec,
    pub dynamics: Option<DynamicsOutput>,
    pub spectra: Vec<SpectrumOutput>,
}

#[derive(Debug, Clone)]
pub struct DynamicsOutput {
    pub trajectory: Trajectory,
    /// Packet preparation and propagation diagnostics together.
    pub diagnostics: Vec<Diagnostic>,
    pub pulses: Option<PulseReport>,
    pub velocity: Option<VelocityFit>,
}

#[derive(Debug, Clone)]
pub struct SpectrumOutput {
    pub omega: f64,
    pub rows: Vec<ScatteringResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseReport {
    pub time: f64,
    pub threshold: f64,
    pub channels: Vec<ChannelPulses>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelPulses {
    pub region: &'static str,
    pub events: Vec<PulseEvent>,
    /// Lag of the secondary behind the primary, in time units.
    pub delay: Option<f64>,
}

impl PulseReport {
    pub fn channel(&self, region: Region) -> Option<&ChannelPulses> {
        self.channels.iter().find(|c| c.region == region.label())
    }
}

pub fn simulate(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let system = config.system_spec()?;
    let dynamics = match &config.dynamics {
        Some(_) => Some(run_dynamics(config, &system)?),
        None => None,
    };
    let mut spectra = Vec::new();
    if let Some(s) = &config.spectrum {
        let grid = s.grid.energies();
        for &omega in &s.omegas {
            spectra.push(SpectrumOutput {
                omega,
                rows: spectrum(&system, omega, &grid)?,
            });
        }
    }
    Ok(RunOutput {
        config: config.clone(),
        system,
        dynamics,
        spectra,
    })
}

fn run_dynamics(config: &ExperimentConfig, system: &SystemSpec) -> Result<DynamicsOutput> {
    let d = config.dynamics.as_ref().expect("checked by caller");
    let (state0, mut diagnostics) = make_gaussian_packet(&d.packet, system)?;
    let schedule = d.effective_schedule()?;
    let trajectory = propagate(system, &state0, &schedule, d.t_end, d.dt, &d.probes)?;
    diagnostics.extend(trajectory.diagnostics.iter().cloned());
    for diag in &diagnostics {
        warn!("{}: {:?}", config.name, diag);
    }

    let pulses = if config.outputs.pulses {
        pulse_report(config, system, &trajectory)?
    } else {
        None
    };
    let velocity = if trajectory.occupations.is_empty() {
        None
    } else {
        estimate_in_junction_velocity(&trajectory.times, &trajectory.occupations).ok()
    };
    Ok(DynamicsOutput {
        trajectory,
        diagnostics,
        pulses,
        velocity,
    })
}

fn pulse_report(
    config: &ExperimentConfig,
    system: &SystemSpec,
    trajectory: &Trajectory,
) -> Result<Option<PulseReport>> {
    let snapshots = &trajectory.snapshots;
    let snap = match config.outputs.pulse_time {
        Some(t) => snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .filter(|s| (s.t - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or_else(|| SimError::Invalid(format!("no density snapshot at t = {t}")))?,
        None => match snapshots.last() {
            Some(s) => s,
            None => return Ok(None),
        },
    };
    let k0 = config.dynamics.as_ref().map_or(0.0, |d| d.packet.k0);
    let threshold = config.outputs.pulse_threshold;
    let mut channels = Vec::new();
    for region in Region::CHANNELS {
        let mut events = detect_region_pulses(system, &snap.alpha, &snap.beta, region, threshold)?;
        classify_pulses(&mut events);
        let primary = events.iter().find(|e| e.classification == PulseClass::Primary);
        let secondary = events
            .iter()
            .filter(|e| e.classification == PulseClass::Secondary)
            .max_by(|a, b| a.mass.total_cmp(&b.mass));
        let delay = match (primary, secondary) {
            (Some(p), Some(s)) => Some(pulse_delay(p, s, k0)),
            _ => None,
        };
        channels.push(ChannelPulses {
            region: region.label(),
            events,
            delay,
        });
    }
    Ok(Some(PulseReport {
        time: snap.t,
        threshold,
        channels,
    }))
}
