//! Reported quantities: channel probabilities, atomic occupations, pulse
//! events and the slow in-junction velocity.

use alloc::vec::Vec;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{group_velocity, Region, SystemSpec};

/// Integrated probabilities per region.
///
/// `p_c` counts only atomic amplitudes; `p_cwg` holds the waveguide density
/// at the junction sites `1..=N_a` of both guides.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbabilitySummary {
    pub p_al: f64,
    pub p_ar: f64,
    pub p_bl: f64,
    pub p_br: f64,
    pub p_c: f64,
    pub p_cwg: f64,
}

impl ProbabilitySummary {
    pub fn total(&self) -> f64 {
        self.p_al + self.p_ar + self.p_bl + self.p_br + self.p_c + self.p_cwg
    }

    pub fn channel(&self, region: Region) -> f64 {
        match region {
            Region::AL => self.p_al,
            Region::AR => self.p_ar,
            Region::BL => self.p_bl,
            Region::BR => self.p_br,
            Region::AC | Region::BC => self.p_cwg,
        }
    }
}

fn density_sum(x: &[num_complex::Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn integrated_probabilities(state: &State, system: &SystemSpec) -> ProbabilitySummary {
    let a = |r| density_sum(&state.alpha[system.region_offsets(r)]);
    let b = |r| density_sum(&state.beta[system.region_offsets(r)]);
    ProbabilitySummary {
        p_al: a(Region::AL),
        p_ar: a(Region::AR),
        p_bl: b(Region::BL),
        p_br: b(Region::BR),
        p_c: density_sum(&state.u) + density_sum(&state.v),
        p_cwg: a(Region::AC) + b(Region::BC),
    }
}

/// `(|u_j|², |v_j|²)` for one atom.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AtomOccupation {
    pub excited: f64,
    pub storage: f64,
}

impl AtomOccupation {
    pub fn total(&self) -> f64 {
        self.excited + self.storage
    }
}

pub fn atomic_occupations(state: &State) -> Vec<AtomOccupation> {
    state
        .u
        .iter()
        .zip(&state.v)
        .map(|(u, v)| AtomOccupation {
            excited: u.norm_sqr(),
            storage: v.norm_sqr(),
        })
        .collect()
}

/// Default detection threshold, as a fraction of the peak density.
pub const DEFAULT_PULSE_THRESHOLD: f64 = 0.02;
/// Below this peak density a region is considered empty.
pub const PULSE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PulseClass {
    Primary,
    Secondary,
    Unknown,
}

/// A contiguous lump of density in one region.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PulseEvent {
    pub region: Region,
    /// Density-weighted mean site index.
    pub centroid: f64,
    pub mass: f64,
    /// RMS spatial width in sites.
    pub width: f64,
    pub first_site: i64,
    pub last_site: i64,
    pub classification: PulseClass,
}

/// Splits a region's density into pulses.
///
/// `density[i]` belongs to site `first_site + i`. Sites whose density is at
/// least `threshold * max(density)` are grouped into contiguous runs, one
/// event per run. Each run is then widened down both flanks to the nearest
/// local minimum, so a pulse's tails count towards its mass, centroid and
/// width. Events come back sorted by centroid and unclassified.
pub fn detect_pulses(
    region: Region,
    first_site: i64,
    density: &[f64],
    threshold: f64,
) -> Result<Vec<PulseEvent>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: "must lie in (0, 1]",
        });
    }
    if density.iter().any(|&d| !(d >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "density",
            reason: "must be non-negative",
        });
    }
    let peak = density.iter().copied().fold(0.0, f64::max);
    if peak < PULSE_FLOOR {
        return Ok(Vec::new());
    }
    let cut = threshold * peak;

    let mut cores: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < density.len() {
        if density[i] < cut {
            i += 1;
            continue;
        }
        let start = i;
        while i < density.len() && density[i] >= cut {
            i += 1;
        }
        cores.push((start, i));
    }

    // widen each core over its falling flanks without crossing a neighbour
    let mut spans: Vec<(usize, usize)> = Vec::with_capacity(cores.len());
    for (idx, &(start, stop)) in cores.iter().enumerate() {
        let left_limit = spans.last().map_or(0, |&(_, e)| e);
        let right_limit = cores.get(idx + 1).map_or(density.len(), |&(s, _)| s);
        let mut lo = start;
        while lo > left_limit && density[lo - 1] <= density[lo] {
            lo -= 1;
        }
        let mut hi = stop;
        while hi < right_limit && density[hi] <= density[hi - 1] {
            hi += 1;
        }
        spans.push((lo, hi));
    }

    Ok(spans
        .into_iter()
        .map(|(lo, hi)| {
            let run = &density[lo..hi];
            let mass: f64 = run.iter().sum();
            let mean = run
                .iter()
                .enumerate()
                .map(|(o, d)| o as f64 * d)
                .sum::<f64>()
                / mass;
            let var = run
                .iter()
                .enumerate()
                .map(|(o, d)| (o as f64 - mean) * (o as f64 - mean) * d)
                .sum::<f64>()
                / mass;
            let origin = first_site + lo as i64;
            PulseEvent {
                region,
                centroid: origin as f64 + mean,
                mass,
                // a one-site run has zero variance; report half a site
                width: math::sqrt(var).max(0.5),
                first_site: origin,
                last_site: first_site + hi as i64 - 1,
                classification: PulseClass::Unknown,
            }
        })
        .collect())
}

/// Runs [`detect_pulses`] on one channel of a density snapshot.
pub fn detect_region_pulses(
    system: &SystemSpec,
    alpha: &[f64],
    beta: &[f64],
    region: Region,
    threshold: f64,
) -> Result<Vec<PulseEvent>> {
    let density = match region.waveguide() {
        crate::model::Waveguide::A => alpha,
        crate::model::Waveguide::B => beta,
    };
    let range = system.region_offsets(region);
    let first = *system.region_sites(region).start();
    detect_pulses(region, first, &density[range], threshold)
}

/// Labels events of one channel: the pulse that left the junction first
/// (farthest from it) is primary, the rest secondary.
pub fn classify_pulses(events: &mut [PulseEvent]) {
    let Some(region) = events.first().map(|e| e.region) else {
        return;
    };
    let distance = |e: &PulseEvent| {
        if region.is_left() {
            -e.centroid
        } else {
            e.centroid
        }
    };
    let lead = events
        .iter()
        .enumerate()
        .max_by(|a, b| distance(a.1).total_cmp(&distance(b.1)))
        .map(|(i, _)| i);
    for (i, e) in events.iter_mut().enumerate() {
        e.classification = if Some(i) == lead {
            PulseClass::Primary
        } else {
            PulseClass::Secondary
        };
    }
}

/// Delay of `secondary` behind `primary`, from their centroid gap at one
/// instant and the free group velocity at `k0`.
pub fn pulse_delay(primary: &PulseEvent, secondary: &PulseEvent, k0: f64) -> f64 {
    (primary.centroid - secondary.centroid).abs() / group_velocity(k0)
}

/// Stored population above which an occupation record joins the fit.
pub const STORAGE_WINDOW_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VelocityFit {
    /// Atoms per unit time.
    pub slope: f64,
    pub intercept: f64,
    /// RMS deviation of the centroid from the fitted line.
    pub residual: f64,
    pub t_start: f64,
    pub t_stop: f64,
    pub samples: usize,
}

/// Least-squares slope of the storage-population centroid
/// `c(t) = Σ j|v_j|² / Σ|v_j|²` over the longest run of records where
/// `Σ|v_j|² > 0.1`.
pub fn estimate_in_junction_velocity(
    times: &[f64],
    occupations: &[Vec<AtomOccupation>],
) -> Result<VelocityFit> {
    let stored: Vec<f64> = occupations
        .iter()
        .map(|occ| occ.iter().map(|o| o.storage).sum())
        .collect();

    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < stored.len() {
        if stored[i] <= STORAGE_WINDOW_FLOOR {
            i += 1;
            continue;
        }
        let start = i;
        while i < stored.len() && stored[i] > STORAGE_WINDOW_FLOOR {
            i += 1;
        }
        if best.is_none_or(|(s, e)| i - start > e - s) {
            best = Some((start, i));
        }
    }
    let (start, stop) = match best {
        Some((s, e)) if e - s >= 2 => (s, e),
        _ => {
            return Err(Error::NoPulse {
                floor: STORAGE_WINDOW_FLOOR,
            })
        }
    };

    let points: Vec<(f64, f64)> = (start..stop)
        .map(|k| {
            let c = occupations[k]
                .iter()
                .enumerate()
                .map(|(j, o)| (j + 1) as f64 * o.storage)
                .sum::<f64>()
                / stored[k];
            (times[k], c)
        })
        .collect();
    let m = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / m;
    let c_mean = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - t_mean) * (p.0 - t_mean)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - t_mean) * (p.1 - c_mean)).sum();
    let slope = sxy / sxx;
    let intercept = c_mean - slope * t_mean;
    let ss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    Ok(VelocityFit {
        slope,
        intercept,
        residual: math::sqrt(ss / m),
        t_start: points[0].0,
        t_stop: points[points.len() - 1].0,
        samples: points.len(),
    })
}
