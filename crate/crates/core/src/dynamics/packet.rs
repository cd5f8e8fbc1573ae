use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{norm, Diagnostic, State, C64};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{SystemSpec, Waveguide};

/// Mass of the continuum Gaussian allowed to fall off the chain before a
/// diagnostic is raised.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

/// Gaussian wave packet launched in one waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct WavePacketSpec {
    /// Initial center (site index).
    pub n0: f64,
    /// Carrier wavevector.
    pub k0: f64,
    /// Real-space width in sites.
    pub sigma: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_channel"))]
    pub channel: Waveguide,
}

#[cfg(feature = "serde")]
fn default_channel() -> Waveguide {
    Waveguide::A
}

impl WavePacketSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "must be positive",
            });
        }
        if !(self.k0 > 0.0 && self.k0 < PI) {
            return Err(Error::InvalidParameter {
                name: "k0",
                reason: "must lie in (0, pi)",
            });
        }
        if !self.n0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n0",
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Mass of the density `exp(-(n-n0)²/σ²)` (normalized over the real
    /// line) that lies outside the half-open cells of the chain.
    fn mass_outside(&self, system: &SystemSpec) -> f64 {
        let lo = (self.n0 - (system.first_site() as f64 - 0.5)) / self.sigma;
        let hi = ((system.last_site() as f64 + 0.5) - self.n0) / self.sigma;
        0.5 * (libm::erfc(lo) + libm::erfc(hi))
    }
}

/// Builds `C exp(-(n-n0)²/(2σ²) + i k0 n)` on the chosen waveguide, with `C`
/// fixed so the discrete norm is exactly one.
pub fn make_gaussian_packet(
    spec: &WavePacketSpec,
    system: &SystemSpec,
) -> Result<(State, Vec<Diagnostic>)> {
    spec.validate()?;
    let mut state = State::zeros(system);
    let amplitudes = match spec.channel {
        Waveguide::A => &mut state.alpha,
        Waveguide::B => &mut state.beta,
    };
    let two_var = 2.0 * spec.sigma * spec.sigma;
    for (off, a) in amplitudes.iter_mut().enumerate() {
        let n = system.site_at(off) as f64;
        let x = n - spec.n0;
        let env = math::exp(-x * x / two_var);
        let phase = spec.k0 * n;
        *a = C64::new(env * math::cos(phase), env * math::sin(phase));
    }
    let total = norm(&state);
    if !(total > 0.0) {
        return Err(Error::InvalidParameter {
            name: "n0",
            reason: "packet has no weight on the chain",
        });
    }
    state.scale(C64::new(1.0 / math::sqrt(total), 0.0));

    let mut diagnostics = Vec::new();
    let lost = spec.mass_outside(system);
    if lost > TRUNCATION_LIMIT {
        diagnostics.push(Diagnostic::PacketTruncated { lost_mass: lost });
    }
    Ok((state, diagnostics))
}
