//! Stationary single-photon scattering off the junction.
//!
//! A plane wave `e^{ikn}` arrives from the left in one guide. Outside the
//! junction the amplitudes are
//!
//! ```text
//! α_n = e^{ikn} + r_A e^{-ikn},  β_n = r_B e^{-ikn}   (n ≤ 0)
//! α_n = t_A e^{ikn},             β_n = t_B e^{ikn}    (n ≥ N_a + 1)
//! ```
//!
//! and the stationary equations at sites `0..=N_a+1` plus the atomic rows give
//! a square system of size `4N_a + 4`. All four channels share the same group
//! velocity, so probabilities are plain moduli squared.
//!
//! [`solve_reduced`] is an independent route: it eliminates the atoms into an
//! on-site potential for the symmetric combination of the guides and runs a
//! transfer recursion on that single chain.

mod linalg;

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{wavevector_for_energy, SystemSpec, Waveguide};

use linalg::Dense;

/// Below this, `E² - Ω²` (or its detuned analogue) counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Default spectrum grid: `(lo, hi, points)`.
pub const DEFAULT_GRID: (f64, f64, usize) = (-1.8, 1.8, 1201);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub energy: f64,
    pub k: f64,
    pub t_a: Complex64,
    pub t_b: Complex64,
    pub r_a: Complex64,
    pub r_b: Complex64,
    pub t_ar: f64,
    pub t_br: f64,
    pub r_al: f64,
    pub r_bl: f64,
}

impl ScatteringResult {
    fn from_amplitudes(energy: f64, k: f64, t_a: Complex64, t_b: Complex64, r_a: Complex64, r_b: Complex64) -> Self {
        Self {
            energy,
            k,
            t_a,
            t_b,
            r_a,
            r_b,
            t_ar: t_a.norm_sqr(),
            t_br: t_b.norm_sqr(),
            r_al: r_a.norm_sqr(),
            r_bl: r_b.norm_sqr(),
        }
    }

    pub fn total(&self) -> f64 {
        self.t_ar + self.t_br + self.r_al + self.r_bl
    }

    /// `|1 - (T_AR + T_BR + R_AL + R_BL)|`.
    pub fn unitarity_defect(&self) -> f64 {
        (1.0 - self.total()).abs()
    }

    pub fn probabilities(&self) -> [f64; 4] {
        [self.t_ar, self.t_br, self.r_al, self.r_bl]
    }
}

/// Coupling-matrix element the atoms add between the junction sites of the
/// two guides, `χ = g²E/(E² − Ω²)`. The symmetric combination of the guides
/// sees `2χ`, the antisymmetric one nothing.
pub fn atomic_self_energy(energy: f64, omega: f64, g: f64) -> Result<f64> {
    let den = energy * energy - omega * omega;
    if den.abs() < POLE_TOLERANCE {
        return Err(Error::Pole { energy, omega });
    }
    Ok(g * g * energy / den)
}

enum Dressing {
    Potential(f64),
    HardWall,
}

/// Detuning-aware form of [`atomic_self_energy`].
fn dressing(energy: f64, omega: f64, system: &SystemSpec) -> Dressing {
    let p = system.params();
    if p.g == 0.0 {
        return Dressing::Potential(0.0);
    }
    let (num, den) = if omega == 0.0 {
        (energy - p.delta_e, 1.0)
    } else {
        let ds = energy - p.delta_storage();
        ((energy - p.delta_e) * ds - omega * omega, ds)
    };
    if num.abs() < POLE_TOLERANCE {
        Dressing::HardWall
    } else {
        Dressing::Potential(p.g * p.g * den / num)
    }
}

fn check_energy(energy: f64) -> Result<f64> {
    wavevector_for_energy(energy)
}

/// Full linear solve for a wave incident in guide A.
pub fn solve_stationary(energy: f64, system: &SystemSpec, omega: f64) -> Result<ScatteringResult> {
    solve_stationary_from(energy, system, omega, Waveguide::A)
}

/// Full linear solve for a wave incident from the left in `incoming`.
pub fn solve_stationary_from(
    energy: f64,
    system: &SystemSpec,
    omega: f64,
    incoming: Waveguide,
) -> Result<ScatteringResult> {
    let k = check_energy(energy)?;
    if !omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: "must be finite",
        });
    }
    let p = system.params();
    let na = system.n_atoms();
    let dim = 4 * na + 4;
    let (r_a, r_b, t_a, t_b) = (0, 1, 2, 3);
    let alpha = |j: usize| 4 + j - 1;
    let beta = |j: usize| 4 + na + j - 1;
    let u = |j: usize| 4 + 2 * na + j - 1;
    let v = |j: usize| 4 + 3 * na + j - 1;

    let one = Complex64::new(1.0, 0.0);
    let e = Complex64::new(energy, 0.0);
    let fwd = Complex64::from_polar(1.0, k);
    let back = fwd.conj();
    let out_phase = Complex64::from_polar(1.0, k * (na + 1) as f64);
    let amp_in = |guide: Waveguide| if guide == incoming { one } else { Complex64::new(0.0, 0.0) };

    let mut m = Dense::zeros(dim);
    let mut b = alloc::vec![Complex64::new(0.0, 0.0); dim];

    for (guide, refl, trans, site) in [
        (Waveguide::A, r_a, t_a, &alpha as &dyn Fn(usize) -> usize),
        (Waveguide::B, r_b, t_b, &beta as &dyn Fn(usize) -> usize),
    ] {
        let inc = amp_in(guide);
        // site 0
        *m.at(refl, refl) = e + fwd;
        *m.at(refl, site(1)) = one;
        b[refl] = -inc * (e + back);
        // site N_a + 1
        *m.at(trans, trans) = out_phase * (e + fwd);
        *m.at(trans, site(na)) = one;
        // junction sites
        for j in 1..=na {
            let row = site(j);
            *m.at(row, row) = e;
            if j > 1 {
                *m.at(row, site(j - 1)) = one;
            } else {
                *m.at(row, refl) = one;
                b[row] -= inc;
            }
            if j < na {
                *m.at(row, site(j + 1)) = one;
            } else {
                *m.at(row, trans) += out_phase;
            }
            *m.at(row, u(j)) = Complex64::new(-p.g, 0.0);
        }
    }

    for j in 1..=na {
        if p.g == 0.0 {
            *m.at(u(j), u(j)) = one;
            *m.at(v(j), v(j)) = one;
            continue;
        }
        *m.at(u(j), u(j)) = Complex64::new(energy - p.delta_e, 0.0);
        *m.at(u(j), v(j)) = Complex64::new(-omega, 0.0);
        *m.at(u(j), alpha(j)) = Complex64::new(-p.g, 0.0);
        *m.at(u(j), beta(j)) = Complex64::new(-p.g, 0.0);
        if omega == 0.0 {
            // dark storage level: no scattering amplitude reaches it
            *m.at(v(j), v(j)) = one;
        } else {
            *m.at(v(j), v(j)) = Complex64::new(energy - p.delta_storage(), 0.0);
            *m.at(v(j), u(j)) = Complex64::new(-omega, 0.0);
        }
    }

    let x = m
        .solve(b)
        .map_err(|pivot| Error::Singular { energy, pivot })?;
    Ok(ScatteringResult::from_amplitudes(energy, k, x[t_a], x[t_b], x[r_a], x[r_b]))
}

/// Reduced solve for a wave incident in guide A: atoms folded into an
/// on-site potential for the symmetric sector, switching to a hard wall at
/// the self-energy pole.
pub fn solve_reduced(energy: f64, system: &SystemSpec, omega: f64) -> Result<ScatteringResult> {
    let k = check_energy(energy)?;
    let na = system.n_atoms();
    let fwd = Complex64::from_polar(1.0, k);

    let (t_s, r_s) = match dressing(energy, omega, system) {
        Dressing::HardWall => (Complex64::new(0.0, 0.0), -fwd * fwd),
        Dressing::Potential(chi) => {
            let pot = 2.0 * chi;
            // backward recursion from a unit transmitted wave
            let mut next = Complex64::from_polar(1.0, k * (na + 2) as f64);
            let mut cur = Complex64::from_polar(1.0, k * (na + 1) as f64);
            for n in (0..=na + 1).rev() {
                let on_site = if (1..=na).contains(&n) { pot } else { 0.0 };
                let prev = (on_site - energy) * cur - next;
                next = cur;
                cur = prev;
            }
            // cur = ψ_{-1}, next = ψ_0
            let (psi_m1, psi_0) = (cur, next);
            let incident = (psi_m1 - psi_0 * fwd) / (fwd.conj() - fwd);
            let reflected = psi_0 - incident;
            (incident.inv(), reflected / incident)
        }
    };
    let half = 0.5;
    let t_a = (t_s + 1.0) * half;
    let t_b = (t_s - 1.0) * half;
    let r_a = r_s * half;
    let r_b = r_s * half;
    Ok(ScatteringResult::from_amplitudes(energy, k, t_a, t_b, r_a, r_b))
}

/// Uniform grid of `points` energies on `[lo, hi]`. A grid symmetric about
/// zero is exactly symmetric in floating point.
pub fn energy_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![0.5 * (lo + hi)],
        _ => {
            let last = (points - 1) as f64;
            (0..points)
                .map(|i| (lo * (last - i as f64) + hi * i as f64) / last)
                .collect()
        }
    }
}

/// One [`solve_stationary`] result per grid energy, in grid order.
pub fn transmission_spectrum(grid: &[f64], system: &SystemSpec, omega: f64) -> Result<Vec<ScatteringResult>> {
    grid.iter()
        .map(|&energy| {
            solve_stationary(energy, system, omega).map_err(|e| Error::AtEnergy {
                energy,
                source: Box::new(e),
            })
        })
        .collect()
}
