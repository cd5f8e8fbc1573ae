//! Single-excitation dynamics.
//!
//! The state holds one amplitude per waveguide site in each guide (`alpha`,
//! `beta`) plus the excited (`u`) and storage (`v`) amplitudes of each atom.
//! With hopping fixed to one the amplitudes obey
//!
//! ```text
//! dα_n/dt = i(α_{n+1} + α_{n-1}) - i g δ_{nj} u_j
//! dβ_n/dt = i(β_{n+1} + β_{n-1}) - i g δ_{nj} u_j
//! du_j/dt = -iΩ v_j - i g (α_j + β_j) - iΔe u_j
//! dv_j/dt = -iΩ u_j - i(Δe - Δs) v_j
//! ```
//!
//! with hard walls at both chain ends.

mod packet;
mod propagate;
mod schedule;

pub use packet::{make_gaussian_packet, WavePacketSpec};
pub use propagate::{propagate, CrankNicolson, DensitySnapshot, ProbeConfig, Trajectory};
pub use schedule::{ControlSchedule, Segment};

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemSpec;

pub type C64 = Complex64;

/// Non-fatal conditions noticed while preparing or propagating a state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Diagnostic {
    /// Part of the continuum Gaussian lies beyond the chain ends.
    PacketTruncated { lost_mass: f64 },
    /// Channel density near a hard wall exceeded the contamination limit.
    BoundaryContamination { first_time: f64, max_density: f64 },
}

/// Amplitude vector of the single-excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

/// Time derivative of a [`State`]; same layout.
pub type StateDerivative = State;

impl State {
    pub fn zeros(system: &SystemSpec) -> Self {
        let l = system.sites_per_guide();
        let na = system.n_atoms();
        Self {
            alpha: vec![C64::new(0.0, 0.0); l],
            beta: vec![C64::new(0.0, 0.0); l],
            u: vec![C64::new(0.0, 0.0); na],
            v: vec![C64::new(0.0, 0.0); na],
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len() + self.beta.len() + self.u.len() + self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks every array length against `system`.
    pub fn check(&self, system: &SystemSpec) -> Result<()> {
        let l = system.sites_per_guide();
        let na = system.n_atoms();
        if self.alpha.len() != l || self.beta.len() != l || self.u.len() != na || self.v.len() != na
        {
            return Err(Error::DimensionMismatch {
                expected: system.dimension(),
                found: self.len(),
            });
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.alpha
            .iter()
            .chain(&self.beta)
            .chain(&self.u)
            .chain(&self.v)
    }

    fn iter_mut(&mut self) -> impl Iterator<Item = &mut C64> {
        self.alpha
            .iter_mut()
            .chain(&mut self.beta)
            .chain(&mut self.u)
            .chain(&mut self.v)
    }

    pub fn scale(&mut self, c: C64) {
        self.iter_mut().for_each(|x| *x *= c);
    }

    pub fn scaled(&self, c: C64) -> Self {
        let mut s = self.clone();
        s.scale(c);
        s
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &State, f: impl Fn(C64, C64) -> C64) -> State {
        let z = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect();
        State {
            alpha: z(&self.alpha, &other.alpha),
            beta: z(&self.beta, &other.beta),
            u: z(&self.u, &other.u),
            v: z(&self.v, &other.v),
        }
    }
}

impl Add for &State {
    type Output = State;
    fn add(self, rhs: &State) -> State {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &State {
    type Output = State;
    fn sub(self, rhs: &State) -> State {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &State {
    type Output = State;
    fn mul(self, rhs: f64) -> State {
        self.scaled(C64::new(rhs, 0.0))
    }
}

/// `Σ|α|² + Σ|β|² + Σ|u|² + Σ|v|²`.
pub fn norm(state: &State) -> f64 {
    state.iter().map(|z| z.norm_sqr()).sum()
}

/// Right-hand side of the amplitude equations at fixed control field.
pub fn rhs(system: &SystemSpec, state: &State, omega: f64) -> Result<StateDerivative> {
    state.check(system)?;
    let p = system.params();
    let i = C64::i();
    let mut out = State::zeros(system);

    for (src, dst) in [(&state.alpha, &mut out.alpha), (&state.beta, &mut out.beta)] {
        let l = src.len();
        for n in 0..l {
            let mut hop = C64::new(0.0, 0.0);
            if n > 0 {
                hop += src[n - 1];
            }
            if n + 1 < l {
                hop += src[n + 1];
            }
            dst[n] = i * hop;
        }
    }
    for j in 0..system.n_atoms() {
        let site = system.atom_site_offset(j + 1);
        let (u, v) = (state.u[j], state.v[j]);
        out.alpha[site] -= i * p.g * u;
        out.beta[site] -= i * p.g * u;
        out.u[j] = -i * (omega * v + p.g * (state.alpha[site] + state.beta[site]) + p.delta_e * u);
        out.v[j] = -i * (omega * u + p.delta_storage() * v);
    }
    Ok(out)
}

/// State rewritten in the symmetric/antisymmetric waveguide basis.
///
/// Only the symmetric combination couples to the atoms, so `u` and `v` are
/// carried with it.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSplit {
    pub symmetric: Vec<C64>,
    pub antisymmetric: Vec<C64>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl SectorSplit {
    pub fn symmetric_norm(&self) -> f64 {
        self.symmetric
            .iter()
            .chain(&self.u)
            .chain(&self.v)
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn antisymmetric_norm(&self) -> f64 {
        self.antisymmetric.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn recompose(&self) -> State {
        let mut state = State {
            alpha: Vec::with_capacity(self.symmetric.len()),
            beta: Vec::with_capacity(self.symmetric.len()),
            u: self.u.clone(),
            v: self.v.clone(),
        };
        self.recompose_into(&mut state);
        state
    }

    pub(crate) fn recompose_into(&self, state: &mut State) {
        state.alpha.clear();
        state.beta.clear();
        for (s, d) in self.symmetric.iter().zip(&self.antisymmetric) {
            state.alpha.push((s + d) * FRAC_1_SQRT_2);
            state.beta.push((s - d) * FRAC_1_SQRT_2);
        }
        state.u.clone_from(&self.u);
        state.v.clone_from(&self.v);
    }
}

/// `s_n = (α_n + β_n)/√2`, `d_n = (α_n - β_n)/√2`.
pub fn symmetric_antisymmetric_decompose(state: &State) -> SectorSplit {
    let (symmetric, antisymmetric) = state
        .alpha
        .iter()
        .zip(&state.beta)
        .map(|(a, b)| ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2))
        .unzip();
    SectorSplit {
        symmetric,
        antisymmetric,
        u: state.u.clone(),
        v: state.v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, SystemParams};
    use approx::assert_abs_diff_eq;

    fn system(n: usize, na: usize, g: f64) -> SystemSpec {
        build_system(SystemParams {
            n_channel: n,
            n_atoms: na,
            g,
            ..SystemParams::default()
        })
        .unwrap()
    }

    #[test]
    fn rhs_single_excited_atom() {
        let sys = system(5, 3, 0.5);
        let mut s = State::zeros(&sys);
        s.u[0] = C64::new(1.0, 0.0);
        let d = rhs(&sys, &s, 0.5).unwrap();
        let site = sys.offset_of(1).unwrap();
        let mi = C64::new(0.0, -0.5);
        assert_eq!(d.alpha[site], mi);
        assert_eq!(d.beta[site], mi);
        assert_eq!(d.v[0], mi);
        assert_eq!(d.u[0], C64::new(0.0, 0.0));
        let nonzero = d.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn rhs_storage_only_is_static_without_field() {
        let sys = system(5, 3, 0.5);
        let mut s = State::zeros(&sys);
        s.v[1] = C64::new(0.3, -0.2);
        s.v[2] = C64::new(-0.1, 0.7);
        let d = rhs(&sys, &s, 0.0).unwrap();
        assert!(d.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn rhs_plane_wave_is_free_eigenstate() {
        let sys = system(50, 2, 0.0);
        let k = 0.9;
        let mut s = State::zeros(&sys);
        for (off, a) in s.alpha.iter_mut().enumerate() {
            let n = sys.site_at(off) as f64;
            *a = C64::from_polar(1.0, k * n);
        }
        let d = rhs(&sys, &s, 0.3).unwrap();
        let e = crate::model::dispersion(k);
        // ends see the hard wall
        for off in 1..s.alpha.len() - 1 {
            let expected = -C64::i() * e * s.alpha[off];
            assert_abs_diff_eq!((d.alpha[off] - expected).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn rhs_rejects_wrong_dimensions() {
        let sys = system(5, 3, 0.5);
        let mut s = State::zeros(&sys);
        s.u.pop();
        assert!(matches!(rhs(&sys, &s, 0.1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn norm_basics() {
        let sys = system(4, 2, 0.5);
        let mut s = State::zeros(&sys);
        assert_eq!(norm(&s), 0.0);
        s.alpha[1] = C64::new(0.6, 0.0);
        s.v[1] = C64::new(0.0, 0.8);
        assert_abs_diff_eq!(norm(&s), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(norm(&(&s * 2.0)), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn decompose_sectors() {
        let sys = system(6, 2, 0.5);
        let mut s = State::zeros(&sys);
        for (i, a) in s.alpha.iter_mut().enumerate() {
            *a = C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
        }
        let n = norm(&s);
        s.scale(C64::new(1.0 / n.sqrt(), 0.0));
        let split = symmetric_antisymmetric_decompose(&s);
        assert_abs_diff_eq!(split.symmetric_norm(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(split.antisymmetric_norm(), 0.5, epsilon = 1e-14);

        s.beta = s.alpha.clone();
        s.u[0] = C64::new(0.1, 0.2);
        let split = symmetric_antisymmetric_decompose(&s);
        assert!(split.antisymmetric.iter().all(|z| z.norm() == 0.0));
        assert!(split.recompose().max_abs_diff(&s) <= 1e-15);
    }
}
