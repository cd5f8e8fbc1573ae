//! System topology, parameters and free-waveguide kinematics.
//!
//! Energies are measured in units of the inter-site hopping and `ħ = 1`, so
//! times are in units of inverse hopping. Both waveguides share the site
//! index `n ∈ [-N+1, N+N_a]`; atom `j` (1-based) sits next to site `n = j`.

use core::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::math;

/// Static model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SystemParams {
    /// Sites in each left and each right channel.
    pub n_channel: usize,
    /// Number of atoms in the junction.
    pub n_atoms: usize,
    /// Atom-waveguide coupling.
    pub g: f64,
    /// Detuning of the excited level from the photon carrier.
    #[cfg_attr(feature = "serde", serde(default))]
    pub delta_e: f64,
    /// Detuning of the control transition.
    #[cfg_attr(feature = "serde", serde(default))]
    pub delta_s: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            n_channel: 1000,
            n_atoms: 12,
            g: 0.5,
            delta_e: 0.0,
            delta_s: 0.0,
        }
    }
}

impl SystemParams {
    /// Diagonal energy of the `|s_j⟩` level in the rotating frame.
    pub fn delta_storage(&self) -> f64 {
        self.delta_e - self.delta_s
    }

    pub fn is_resonant(&self) -> bool {
        self.delta_e == 0.0 && self.delta_s == 0.0
    }
}

/// Waveguide a region belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Waveguide {
    A,
    B,
}

/// Partition of each waveguide into left channel, junction and right channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Region {
    AL,
    AC,
    AR,
    BL,
    BC,
    BR,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::AL,
        Region::AC,
        Region::AR,
        Region::BL,
        Region::BC,
        Region::BR,
    ];

    pub const CHANNELS: [Region; 4] = [Region::AL, Region::AR, Region::BL, Region::BR];

    pub fn waveguide(self) -> Waveguide {
        match self {
            Region::AL | Region::AC | Region::AR => Waveguide::A,
            Region::BL | Region::BC | Region::BR => Waveguide::B,
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Region::AL | Region::BL)
    }

    pub fn is_right(self) -> bool {
        matches!(self, Region::AR | Region::BR)
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::AL => "A_L",
            Region::AC => "A_C",
            Region::AR => "A_R",
            Region::BL => "B_L",
            Region::BC => "B_C",
            Region::BR => "B_R",
        }
    }
}

/// Validated system descriptor with the index conventions used by every
/// other module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    params: SystemParams,
}

/// Validates `params` and returns the system descriptor.
pub fn build_system(params: SystemParams) -> Result<SystemSpec> {
    if params.n_channel < 1 {
        return Err(Error::InvalidParameter {
            name: "n_channel",
            reason: "must be at least 1",
        });
    }
    if params.n_atoms < 1 {
        return Err(Error::InvalidParameter {
            name: "n_atoms",
            reason: "must be at least 1",
        });
    }
    for (name, x) in [
        ("g", params.g),
        ("delta_e", params.delta_e),
        ("delta_s", params.delta_s),
    ] {
        if !x.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                reason: "must be finite",
            });
        }
    }
    Ok(SystemSpec { params })
}

impl SystemSpec {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn n_channel(&self) -> usize {
        self.params.n_channel
    }

    pub fn n_atoms(&self) -> usize {
        self.params.n_atoms
    }

    pub fn g(&self) -> f64 {
        self.params.g
    }

    /// Sites per waveguide, `2N + N_a`.
    pub fn sites_per_guide(&self) -> usize {
        2 * self.params.n_channel + self.params.n_atoms
    }

    /// Total number of complex amplitudes, `2(2N + N_a) + 2N_a`.
    pub fn dimension(&self) -> usize {
        2 * self.sites_per_guide() + 2 * self.params.n_atoms
    }

    pub fn first_site(&self) -> i64 {
        1 - self.params.n_channel as i64
    }

    pub fn last_site(&self) -> i64 {
        (self.params.n_channel + self.params.n_atoms) as i64
    }

    pub fn site_range(&self) -> RangeInclusive<i64> {
        self.first_site()..=self.last_site()
    }

    /// Array offset of site `n`, or `None` if `n` is off the chain.
    pub fn offset_of(&self, n: i64) -> Option<usize> {
        if self.site_range().contains(&n) {
            Some((n - self.first_site()) as usize)
        } else {
            None
        }
    }

    pub fn site_at(&self, offset: usize) -> i64 {
        self.first_site() + offset as i64
    }

    /// Site index range covered by `region`.
    pub fn region_sites(&self, region: Region) -> RangeInclusive<i64> {
        let na = self.params.n_atoms as i64;
        match region {
            Region::AL | Region::BL => self.first_site()..=0,
            Region::AC | Region::BC => 1..=na,
            Region::AR | Region::BR => na + 1..=self.last_site(),
        }
    }

    /// Array offsets (into a single waveguide's amplitude vector) covered by
    /// `region`.
    pub fn region_offsets(&self, region: Region) -> core::ops::Range<usize> {
        let sites = self.region_sites(region);
        let lo = (*sites.start() - self.first_site()) as usize;
        let hi = (*sites.end() - self.first_site()) as usize + 1;
        lo..hi
    }

    /// Region of waveguide `guide` containing site `n`.
    pub fn region_of(&self, guide: Waveguide, n: i64) -> Option<Region> {
        if !self.site_range().contains(&n) {
            return None;
        }
        let na = self.params.n_atoms as i64;
        let region = match (guide, n) {
            (Waveguide::A, n) if n <= 0 => Region::AL,
            (Waveguide::A, n) if n <= na => Region::AC,
            (Waveguide::A, _) => Region::AR,
            (Waveguide::B, n) if n <= 0 => Region::BL,
            (Waveguide::B, n) if n <= na => Region::BC,
            (Waveguide::B, _) => Region::BR,
        };
        Some(region)
    }

    /// Array offset of the waveguide site atom `j` (1-based) couples to.
    pub fn atom_site_offset(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.params.n_atoms);
        self.params.n_channel - 1 + j
    }
}

/// Free-chain dispersion `E(k) = -2 cos k`.
pub fn dispersion(k: f64) -> f64 {
    -2.0 * math::cos(k)
}

/// Inverse of [`dispersion`] on `[0, π]`.
pub fn wavevector_for_energy(energy: f64) -> Result<f64> {
    if !(energy.abs() < 2.0) {
        return Err(Error::OutOfBand { energy });
    }
    Ok(math::acos(-energy / 2.0))
}

/// Group velocity `dE/dk = 2 sin k`, in sites per unit time.
pub fn group_velocity(k: f64) -> f64 {
    2.0 * math::sin(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn small(n: usize, na: usize) -> SystemSpec {
        build_system(SystemParams {
            n_channel: n,
            n_atoms: na,
            ..SystemParams::default()
        })
        .unwrap()
    }

    /// Bisection on `-2 cos k = E`, independent of `acos`.
    fn bisect_wavevector(energy: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if -2.0 * mid.cos() < energy {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn dimensions() {
        assert_eq!(small(1000, 12).dimension(), 4048);
        assert_eq!(small(1, 1).dimension(), 8);
        let err = build_system(SystemParams {
            n_channel: 0,
            ..SystemParams::default()
        });
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
        let err = build_system(SystemParams {
            n_atoms: 0,
            ..SystemParams::default()
        });
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn region_map_partitions_each_guide() {
        let spec = small(7, 3);
        for guide in [Waveguide::A, Waveguide::B] {
            let mut counts = [0usize; 6];
            for n in spec.site_range() {
                let r = spec.region_of(guide, n).unwrap();
                assert_eq!(r.waveguide(), guide);
                assert!(spec.region_sites(r).contains(&n));
                counts[r as usize] += 1;
            }
            let total: usize = counts.iter().sum();
            assert_eq!(total, spec.sites_per_guide());
        }
        assert_eq!(spec.region_sites(Region::AL), -6..=0);
        assert_eq!(spec.region_sites(Region::AC), 1..=3);
        assert_eq!(spec.region_sites(Region::BR), 4..=10);
        assert_eq!(spec.region_offsets(Region::AC), 7..10);
        assert_eq!(spec.atom_site_offset(1), spec.offset_of(1).unwrap());
        assert_eq!(spec.region_of(Waveguide::A, 11), None);
    }

    #[test]
    fn dispersion_values() {
        assert_abs_diff_eq!(dispersion(FRAC_PI_2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dispersion(0.0), -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dispersion(1.33), -0.476_952_1, epsilon = 1e-7);
    }

    #[test]
    fn wavevector_values_against_bisection() {
        assert_abs_diff_eq!(wavevector_for_energy(0.0).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        let lo = bisect_wavevector(-0.48);
        let hi = bisect_wavevector(0.48);
        assert_abs_diff_eq!(lo, 1.328_43, epsilon = 1e-5);
        assert_abs_diff_eq!(hi, 1.813_16, epsilon = 1e-5);
        assert_abs_diff_eq!(wavevector_for_energy(-0.48).unwrap(), lo, epsilon = 1e-12);
        assert_abs_diff_eq!(wavevector_for_energy(0.48).unwrap(), hi, epsilon = 1e-12);
        assert!(matches!(wavevector_for_energy(2.0), Err(Error::OutOfBand { .. })));
        assert!(matches!(wavevector_for_energy(-2.5), Err(Error::OutOfBand { .. })));
        assert!(wavevector_for_energy(f64::NAN).is_err());
    }

    #[test]
    fn group_velocity_values() {
        assert_abs_diff_eq!(group_velocity(FRAC_PI_2), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(group_velocity(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(group_velocity(1.3284), 1.941_5, epsilon = 1e-4);
        // width estimate sigma = v_g / dE for dE = 0.02
        let sigma = group_velocity(1.3284) / 0.02;
        assert!((sigma - 97.0).abs() < 0.2);
    }

    proptest! {
        #[test]
        fn dispersion_inverts(e in -1.999_f64..1.999) {
            let k = wavevector_for_energy(e).unwrap();
            prop_assert!((dispersion(k) - e).abs() <= 1e-12);
        }

        #[test]
        fn dispersion_monotone(a in 0.0_f64..PI, b in 0.0_f64..PI) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            prop_assert!(dispersion(lo) < dispersion(hi));
        }
    }
}
