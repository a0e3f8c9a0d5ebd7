use serde::{Deserialize, Serialize};

use crate::constants;
use crate::species::SpinSpecies;
use crate::{Error, Result};

const AXIS_NORM_TOL: f64 = 1e-12;

/// The NV quantum probe: zero-field splitting, dephasing, background
/// relaxation, depth below the diamond surface and symmetry axis (also the
/// applied-field direction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NvProbe {
    /// Zero-field splitting D, Hz.
    pub zero_field_splitting_hz: f64,
    /// NV gyromagnetic ratio, Hz/T.
    pub gamma_hz_per_t: f64,
    /// Dephasing rate Γ2, s⁻¹.
    pub dephasing_rate: f64,
    /// Background longitudinal relaxation rate Γ_bg, s⁻¹.
    pub background_rate: f64,
    /// Depth below the diamond surface, nm.
    pub depth_nm: f64,
    /// Unit vector along the NV symmetry axis.
    pub axis: [f64; 3],
}

impl NvProbe {
    pub fn new(
        zero_field_splitting_hz: f64,
        gamma_hz_per_t: f64,
        dephasing_rate: f64,
        background_rate: f64,
        depth_nm: f64,
        axis: [f64; 3],
    ) -> Result<Self> {
        let probe = NvProbe {
            zero_field_splitting_hz,
            gamma_hz_per_t,
            dephasing_rate,
            background_rate,
            depth_nm,
            axis,
        };
        probe.validate()?;
        Ok(probe)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zero_field_splitting_hz > 0.0) {
            return Err(Error::invalid("probe.zero_field_splitting_hz", "must be > 0"));
        }
        if !(self.dephasing_rate > 0.0) {
            return Err(Error::invalid("probe.dephasing_rate", "must be > 0"));
        }
        if !(self.background_rate >= 0.0) {
            return Err(Error::invalid("probe.background_rate", "must be >= 0"));
        }
        if !(self.depth_nm > 0.0) {
            return Err(Error::invalid("probe.depth_nm", "must be > 0"));
        }
        let n = norm(self.axis);
        if (n - 1.0).abs() > AXIS_NORM_TOL {
            return Err(Error::invalid(
                "probe.axis",
                format!("must be a unit vector, |axis| = {n}"),
            ));
        }
        Ok(())
    }
}

impl Default for NvProbe {
    fn default() -> Self {
        NvProbe {
            zero_field_splitting_hz: constants::NV_ZERO_FIELD_SPLITTING_HZ,
            gamma_hz_per_t: constants::GAMMA_NV_HZ_PER_T,
            dephasing_rate: 1.0e6,
            background_rate: 200.0,
            depth_nm: 10.0,
            axis: [0.0, 0.0, 1.0],
        }
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Field at which the |0>↔|-1> NV transition frequency equals the target
/// Larmor frequency, B* = D / (γ_NV - γ_n).
///
/// Valid just above the ground-state level anti-crossing, where
/// ω_NV = γ_NV·B - D.
pub fn resonance_field(probe: &NvProbe, species: &SpinSpecies) -> Result<f64> {
    let gamma_n = species.gamma_hz_per_t();
    if gamma_n >= probe.gamma_hz_per_t {
        return Err(Error::NoResonance {
            gamma_n,
            gamma_nv: probe.gamma_hz_per_t,
        });
    }
    Ok(probe.zero_field_splitting_hz / (probe.gamma_hz_per_t - gamma_n))
}

/// |0>↔|-1> transition frequency |γ_NV·B - D| in Hz at field B (tesla).
pub fn nv_transition_frequency(probe: &NvProbe, b_tesla: f64) -> f64 {
    (probe.gamma_hz_per_t * b_tesla - probe.zero_field_splitting_hz).abs()
}

/// Larmor frequency |γ_n|·B in Hz.
pub fn larmor_frequency(species: &SpinSpecies, b_tesla: f64) -> f64 {
    species.gamma_hz_per_t().abs() * b_tesla
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSS_PER_TESLA: f64 = 1.0e4;

    #[test]
    fn resonance_field_13c_matches_quoted_value() {
        let probe = NvProbe::default();
        let b = resonance_field(&probe, &SpinSpecies::carbon_13()).unwrap();
        // quoted 1024.9 G, tolerance ±1.5 G
        assert!((b * GAUSS_PER_TESLA - 1024.9).abs() < 1.5, "got {} G", b * GAUSS_PER_TESLA);
    }

    #[test]
    fn resonance_field_1h_matches_quoted_value() {
        let probe = NvProbe::default();
        let b = resonance_field(&probe, &SpinSpecies::hydrogen_1()).unwrap();
        assert!((b * GAUSS_PER_TESLA - 1026.2).abs() < 1.5, "got {} G", b * GAUSS_PER_TESLA);
    }

    #[test]
    fn zero_larmor_limit_is_gslac() {
        let probe = NvProbe::default();
        let s = SpinSpecies::new("null-ish", 1e-9).unwrap();
        let b = resonance_field(&probe, &s).unwrap();
        let gslac = probe.zero_field_splitting_hz / probe.gamma_hz_per_t;
        assert!((b - gslac).abs() / gslac < 1e-12);
        assert!((gslac * GAUSS_PER_TESLA - 1024.1).abs() < 0.1);
    }

    #[test]
    fn no_crossing_rejected() {
        let probe = NvProbe::default();
        let fast = SpinSpecies::new("e", 2.0 * probe.gamma_hz_per_t).unwrap();
        assert!(resonance_field(&probe, &fast).is_err());
    }

    #[test]
    fn transition_frequency_at_resonance() {
        let probe = NvProbe::default();
        for (species, expect_mhz) in [
            (SpinSpecies::carbon_13(), 1.1),
            (SpinSpecies::hydrogen_1(), 4.4),
        ] {
            let b = resonance_field(&probe, &species).unwrap();
            let f = nv_transition_frequency(&probe, b);
            assert!((f / 1e6 - expect_mhz).abs() < 0.1, "got {} MHz", f / 1e6);
            // transition and Larmor frequencies cross within 1 Hz at B*
            assert!((f - larmor_frequency(&species, b)).abs() < 1.0);
        }
    }

    #[test]
    fn transition_frequency_vanishes_at_gslac() {
        let probe = NvProbe::default();
        let gslac = probe.zero_field_splitting_hz / probe.gamma_hz_per_t;
        assert!(nv_transition_frequency(&probe, gslac) < 1e-6);
    }

    #[test]
    fn larmor_examples() {
        assert!((larmor_frequency(&SpinSpecies::hydrogen_1(), 0.102565) / 1e6 - 4.367).abs() < 1e-2);
        assert_eq!(larmor_frequency(&SpinSpecies::carbon_13(), 0.0), 0.0);
        assert!((larmor_frequency(&SpinSpecies::carbon_13(), 0.10245) / 1e6 - 1.097).abs() < 1e-2);
    }

    #[test]
    fn resonance_field_decreasing_in_gamma() {
        let probe = NvProbe::default();
        let mut species = SpinSpecies::registry();
        species.retain(|s| s.name() != "NV");
        species.sort_by(|a, b| a.gamma_hz_per_t().partial_cmp(&b.gamma_hz_per_t()).unwrap());
        let fields: Vec<f64> = species
            .iter()
            .map(|s| resonance_field(&probe, s).unwrap())
            .collect();
        for w in fields.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn probe_validation() {
        assert!(NvProbe::new(2.87e9, 28.0e9, 1e6, 0.0, -1.0, [0.0, 0.0, 1.0]).is_err());
        assert!(NvProbe::new(2.87e9, 28.0e9, 1e6, 0.0, 10.0, [0.0, 0.0, 1.1]).is_err());
        assert!(NvProbe::new(2.87e9, 28.0e9, 0.0, 0.0, 10.0, [0.0, 0.0, 1.0]).is_err());
    }
}
