//! Crank-Nicolson time stepping.
//!
//! Each step solves `(1 + i dt H/2) ψ' = (1 - i dt H/2) ψ`, which is exactly
//! unitary. In the symmetric/antisymmetric basis the antisymmetric sector is
//! a bare tridiagonal chain and the symmetric sector is a chain with a
//! two-level side branch per atom site, so after eliminating the side branches
//! both solves reduce to the Thomas algorithm.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use super::{
    norm, symmetric_antisymmetric_decompose, ControlSchedule, Diagnostic, SectorSplit, State, C64,
};
use crate::error::{Error, Result};
use crate::math;
use crate::model::SystemSpec;
use crate::observables::{atomic_occupations, integrated_probabilities, AtomOccupation, ProbabilitySummary};

/// Allowed drift of the norm relative to its initial value.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
/// Sites at each chain end watched for wall contamination.
pub const BOUNDARY_SITES: usize = 5;
/// Density near a wall above which a contamination diagnostic is raised.
pub const BOUNDARY_LIMIT: f64 = 1e-6;

/// What to record during a propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ProbeConfig {
    /// Interval between time-series records.
    pub record_interval: f64,
    /// Interval between full density snapshots, if any.
    pub snapshot_interval: Option<f64>,
    /// Record per-atom occupations with every time-series entry.
    pub occupations: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            record_interval: 1.0,
            snapshot_interval: Some(5.0),
            occupations: true,
        }
    }
}

/// Site densities of both waveguides at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySnapshot {
    pub t: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Probes recorded by [`propagate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub omegas: Vec<f64>,
    pub probabilities: Vec<ProbabilitySummary>,
    pub norms: Vec<f64>,
    /// Empty unless occupations were requested.
    pub occupations: Vec<Vec<AtomOccupation>>,
    pub snapshots: Vec<DensitySnapshot>,
    pub final_state: State,
    pub diagnostics: Vec<Diagnostic>,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone)]
struct Tridiagonal {
    off: C64,
    mult: Vec<C64>,
    inv_pivot: Vec<C64>,
}

impl Tridiagonal {
    /// LU factors of the symmetric tridiagonal matrix with the given diagonal
    /// and a constant off-diagonal. Every leading block of `1 + iA` with `A`
    /// Hermitian is invertible, so no pivoting is needed.
    fn new(diag: &[C64], off: C64) -> Self {
        let n = diag.len();
        let mut mult = vec![C64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![C64::new(0.0, 0.0); n];
        let mut pivot = diag[0];
        inv_pivot[0] = pivot.inv();
        for i in 1..n {
            mult[i] = off * inv_pivot[i - 1];
            pivot = diag[i] - mult[i] * off;
            inv_pivot[i] = pivot.inv();
        }
        Self {
            off,
            mult,
            inv_pivot,
        }
    }

    fn solve_in_place(&self, x: &mut [C64]) {
        let n = x.len();
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= self.mult[i] * prev;
        }
        x[n - 1] *= self.inv_pivot[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.off * x[i + 1]) * self.inv_pivot[i];
        }
    }
}

/// Crank-Nicolson stepper for one constant value of the control field.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    system: SystemSpec,
    dt: f64,
    omega: f64,
    half: C64,
    coupling: C64,
    inv_storage: C64,
    inv_excited: C64,
    symmetric: Tridiagonal,
    antisymmetric: Tridiagonal,
    buf_s: Vec<C64>,
    buf_d: Vec<C64>,
    buf_u: Vec<C64>,
    buf_v: Vec<C64>,
}

impl CrankNicolson {
    pub fn new(system: &SystemSpec, dt: f64, omega: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be positive",
            });
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be finite",
            });
        }
        let p = system.params();
        let one = C64::new(1.0, 0.0);
        let half = C64::new(0.0, 0.5 * dt);
        let coupling = half * (SQRT_2 * p.g);
        let inv_storage = (one + half * p.delta_storage()).inv();
        let inv_excited =
            (one + half * p.delta_e - half * half * (omega * omega) * inv_storage).inv();

        let l = system.sites_per_guide();
        let mut diag = vec![one; l];
        let antisymmetric = Tridiagonal::new(&diag, -half);
        for j in 1..=system.n_atoms() {
            diag[system.atom_site_offset(j)] = one - coupling * coupling * inv_excited;
        }
        let symmetric = Tridiagonal::new(&diag, -half);
        let na = system.n_atoms();
        Ok(Self {
            system: *system,
            dt,
            omega,
            half,
            coupling,
            inv_storage,
            inv_excited,
            symmetric,
            antisymmetric,
            buf_s: vec![C64::new(0.0, 0.0); l],
            buf_d: vec![C64::new(0.0, 0.0); l],
            buf_u: vec![C64::new(0.0, 0.0); na],
            buf_v: vec![C64::new(0.0, 0.0); na],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Advances `psi` by one step in place.
    pub fn step(&mut self, psi: &mut SectorSplit) {
        let a = self.half;
        let c = self.coupling;
        let p = self.system.params();
        let omega = self.omega;

        // (1 - aH) ψ
        explicit_hop(&psi.symmetric, &mut self.buf_s, a);
        explicit_hop(&psi.antisymmetric, &mut self.buf_d, a);
        for j in 0..self.system.n_atoms() {
            let site = self.system.atom_site_offset(j + 1);
            let (u, v, s) = (psi.u[j], psi.v[j], psi.symmetric[site]);
            self.buf_s[site] -= c * u;
            let bu = u - a * (p.delta_e * u + omega * v) - c * s;
            let bv = v - a * (omega * u + p.delta_storage() * v);
            // fold the side branch into the chain row
            let bu = bu - a * omega * self.inv_storage * bv;
            self.buf_u[j] = bu;
            self.buf_v[j] = bv;
            self.buf_s[site] -= c * bu * self.inv_excited;
        }

        self.symmetric.solve_in_place(&mut self.buf_s);
        self.antisymmetric.solve_in_place(&mut self.buf_d);
        for j in 0..self.system.n_atoms() {
            let site = self.system.atom_site_offset(j + 1);
            let u = (self.buf_u[j] - c * self.buf_s[site]) * self.inv_excited;
            let v = (self.buf_v[j] - a * omega * u) * self.inv_storage;
            self.buf_u[j] = u;
            self.buf_v[j] = v;
        }

        core::mem::swap(&mut psi.symmetric, &mut self.buf_s);
        core::mem::swap(&mut psi.antisymmetric, &mut self.buf_d);
        core::mem::swap(&mut psi.u, &mut self.buf_u);
        core::mem::swap(&mut psi.v, &mut self.buf_v);
    }
}

/// `out = x + a (x_{n-1} + x_{n+1})`, the chain part of `(1 - aH) x`.
fn explicit_hop(x: &[C64], out: &mut [C64], a: C64) {
    let n = x.len();
    for i in 0..n {
        let mut nb = C64::new(0.0, 0.0);
        if i > 0 {
            nb += x[i - 1];
        }
        if i + 1 < n {
            nb += x[i + 1];
        }
        out[i] = x[i] + a * nb;
    }
}

/// Number of steps of size `dt` in `t`, which must be a whole multiple.
pub(crate) fn aligned_steps(t: f64, dt: f64) -> Result<usize> {
    let ratio = t / dt;
    let steps = math::round(ratio);
    if !(ratio.is_finite() && ratio >= 0.0) || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Misaligned { time: t, dt });
    }
    Ok(steps as usize)
}

struct Recorder<'a> {
    system: &'a SystemSpec,
    probes: &'a ProbeConfig,
    record_every: usize,
    snapshot_every: Option<usize>,
    total_steps: usize,
    initial_norm: f64,
    scratch: State,
    out: Trajectory,
}

impl Recorder<'_> {
    fn visit(&mut self, step: usize, t: f64, omega: f64, psi: &SectorSplit) -> Result<()> {
        let record = step.is_multiple_of(self.record_every) || step == self.total_steps;
        let snapshot = self.snapshot_every.is_some_and(|k| step.is_multiple_of(k));
        if !record && !snapshot {
            return Ok(());
        }
        psi.recompose_into(&mut self.scratch);
        let state = &self.scratch;
        if record {
            let n = norm(state);
            let drift = (n - self.initial_norm).abs();
            self.out.max_norm_drift = self.out.max_norm_drift.max(drift);
            let limit = NORM_DRIFT_LIMIT * self.initial_norm;
            if drift > limit {
                return Err(Error::NormDrift {
                    time: t,
                    drift,
                    limit,
                });
            }
            self.out.times.push(t);
            self.out.omegas.push(omega);
            self.out.norms.push(n);
            self.out
                .probabilities
                .push(integrated_probabilities(state, self.system));
            if self.probes.occupations {
                self.out.occupations.push(atomic_occupations(state));
            }
            note_walls(&mut self.out.diagnostics, t, state);
        }
        if snapshot {
            self.out.snapshots.push(DensitySnapshot {
                t,
                alpha: state.alpha.iter().map(|z| z.norm_sqr()).collect(),
                beta: state.beta.iter().map(|z| z.norm_sqr()).collect(),
            });
        }
        Ok(())
    }
}

fn note_walls(diagnostics: &mut Vec<Diagnostic>, t: f64, state: &State) {
    let k = BOUNDARY_SITES.min(state.alpha.len());
    let edge = |x: &[C64]| -> f64 {
        let head: f64 = x[..k].iter().map(|z| z.norm_sqr()).sum();
        let tail: f64 = x[x.len() - k..].iter().map(|z| z.norm_sqr()).sum();
        head.max(tail)
    };
    let worst = edge(&state.alpha).max(edge(&state.beta));
    if worst <= BOUNDARY_LIMIT {
        return;
    }
    for d in diagnostics.iter_mut() {
        if let Diagnostic::BoundaryContamination { max_density, .. } = d {
            *max_density = max_density.max(worst);
            return;
        }
    }
    diagnostics.push(Diagnostic::BoundaryContamination {
        first_time: t,
        max_density: worst,
    });
}

/// Propagates `state0` to `t_end` under `schedule` with step `dt`.
///
/// Every schedule breakpoint before `t_end`, `t_end` itself and the probe
/// intervals must be whole multiples of `dt`. The norm is checked at every
/// recorded time and the run fails if it drifts from its initial value by
/// more than [`NORM_DRIFT_LIMIT`] (relative).
pub fn propagate(
    system: &SystemSpec,
    state0: &State,
    schedule: &ControlSchedule,
    t_end: f64,
    dt: f64,
    probes: &ProbeConfig,
) -> Result<Trajectory> {
    state0.check(system)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: "must be positive",
        });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: "must be positive",
        });
    }
    if !(probes.record_interval > 0.0) {
        return Err(Error::InvalidParameter {
            name: "record_interval",
            reason: "must be positive",
        });
    }
    let total_steps = aligned_steps(t_end, dt)?;
    let record_every = aligned_steps(probes.record_interval, dt)?.max(1);
    let snapshot_every = match probes.snapshot_interval {
        Some(iv) if iv > 0.0 => Some(aligned_steps(iv, dt)?.max(1)),
        Some(_) => {
            return Err(Error::InvalidParameter {
                name: "snapshot_interval",
                reason: "must be positive",
            })
        }
        None => None,
    };
    let segments: Vec<_> = schedule
        .segments(t_end)
        .map(|seg| {
            Ok((
                aligned_steps(seg.start, dt)?,
                aligned_steps(seg.end, dt)?,
                seg.omega,
            ))
        })
        .collect::<Result<_>>()?;

    let mut rec = Recorder {
        system,
        probes,
        record_every,
        snapshot_every,
        total_steps,
        initial_norm: norm(state0),
        scratch: state0.clone(),
        out: Trajectory {
            times: Vec::new(),
            omegas: Vec::new(),
            probabilities: Vec::new(),
            norms: Vec::new(),
            occupations: Vec::new(),
            snapshots: Vec::new(),
            final_state: state0.clone(),
            diagnostics: Vec::new(),
            max_norm_drift: 0.0,
        },
    };

    let mut psi = symmetric_antisymmetric_decompose(state0);
    rec.visit(0, 0.0, schedule.value_at(0.0), &psi)?;
    for (first, last, omega) in segments {
        let mut stepper = CrankNicolson::new(system, dt, omega)?;
        for step in first..last {
            stepper.step(&mut psi);
            let k = step + 1;
            rec.visit(k, k as f64 * dt, omega, &psi)?;
        }
    }
    let mut out = rec.out;
    psi.recompose_into(&mut out.final_state);
    Ok(out)
}
