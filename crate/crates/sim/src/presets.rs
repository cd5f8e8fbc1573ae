//! Built-in experiments.

use std::f64::consts::FRAC_PI_2;

use junction_core::dynamics::{ControlSchedule, ProbeConfig, WavePacketSpec};
use junction_core::model::{SystemParams, Waveguide};

use crate::config::{
    default_dt, DynamicsConfig, ExperimentConfig, GridSpec, OutputSelection, PauseWindow,
    SpectrumConfig,
};
use crate::error::{Result, SimError};

pub const PRESET_NAMES: [&str; 6] = [
    "routing_off",
    "routing_on",
    "splitting",
    "delay_storage_12",
    "delay_storage_08",
    "spectrum",
];

/// Carrier whose free energy is -0.48, on the plateau of the routing window.
pub const ROUTING_K0: f64 = 1.3284;

/// Pulse snapshot for the storage presets: the delayed pulse has left the
/// junction and the leading one has not reached the far wall.
pub const STORAGE_PULSE_TIME: f64 = 680.0;

/// Threshold for the storage presets: their two output pulses overlap with
/// a valley near 8% of the peak, which the default threshold would merge.
pub const STORAGE_PULSE_THRESHOLD: f64 = 0.1;

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "routing_off" => Ok(scattering_run(name, 0.0)),
        "routing_on" => Ok(scattering_run(name, 0.85)),
        "splitting" => Ok(scattering_run(name, 0.5)),
        "delay_storage_12" => Ok(storage_run(name, 0.12)),
        "delay_storage_08" => Ok(storage_run(name, 0.08)),
        "spectrum" => Ok(ExperimentConfig {
            name: name.into(),
            system: SystemParams::default(),
            dynamics: None,
            spectrum: Some(SpectrumConfig {
                omegas: vec![0.0, 0.85, 0.5],
                grid: GridSpec::default(),
            }),
            outputs: OutputSelection::default(),
        }),
        _ => Err(SimError::UnknownPreset {
            name: name.into(),
            valid: PRESET_NAMES.join(", "),
        }),
    }
}

fn packet(k0: f64) -> WavePacketSpec {
    WavePacketSpec {
        n0: -700.0,
        k0,
        sigma: 100.0,
        channel: Waveguide::A,
    }
}

fn scattering_run(name: &str, omega: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        system: SystemParams::default(),
        dynamics: Some(DynamicsConfig {
            t_end: 1000.0,
            dt: default_dt(),
            packet: packet(ROUTING_K0),
            schedule: ControlSchedule::constant(omega),
            pause: None,
            probes: ProbeConfig::default(),
        }),
        spectrum: None,
        outputs: OutputSelection::default(),
    }
}

fn storage_run(name: &str, omega: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        system: SystemParams::default(),
        dynamics: Some(DynamicsConfig {
            t_end: 1500.0,
            dt: default_dt(),
            packet: packet(FRAC_PI_2),
            schedule: ControlSchedule::constant(omega),
            pause: None,
            probes: ProbeConfig::default(),
        }),
        spectrum: None,
        outputs: OutputSelection {
            pulse_threshold: STORAGE_PULSE_THRESHOLD,
            pulse_time: Some(STORAGE_PULSE_TIME),
            ..OutputSelection::default()
        },
    }
}

/// Storage preset with the control field off on `[t_off, t_on)`.
pub fn with_pause(mut config: ExperimentConfig, t_off: f64, t_on: f64) -> Result<ExperimentConfig> {
    let d = config
        .dynamics
        .as_mut()
        .ok_or_else(|| SimError::Invalid("pause needs a dynamics run".into()))?;
    d.pause = Some(PauseWindow { t_off, t_on });
    config.validate()?;
    Ok(config)
}
