use serde::{Deserialize, Serialize};

use crate::constants::{DIAMOND_BOND_NM, HBAR, MU0_OVER_4PI, NM3_PER_M3};
use crate::probe::NvProbe;
use crate::species::SpinSpecies;
use crate::units::cycles_to_angular;
use crate::{Error, Result};

/// Angular dependence f(θ) of the point-dipole coupling, θ measured from the
/// probe axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularKernel {
    /// f(θ) = 1.
    Isotropic,
    /// f(θ) = (3cos²θ - 1)/2.
    Secular,
    /// f(θ) = (3/2)·sinθ·cosθ, the component driving probe-target flip-flops.
    Transverse,
}

impl AngularKernel {
    #[inline]
    pub fn eval(self, cos_theta: f64) -> f64 {
        let c = cos_theta;
        match self {
            AngularKernel::Isotropic => 1.0,
            AngularKernel::Secular => 0.5 * (3.0 * c * c - 1.0),
            AngularKernel::Transverse => 1.5 * (1.0 - c * c).max(0.0).sqrt() * c,
        }
    }

    /// Spherical average ⟨f²⟩ = (1/2)∫₀^π f²(θ) sinθ dθ, in closed form.
    pub fn mean_square(self) -> f64 {
        match self {
            AngularKernel::Isotropic => 1.0,
            AngularKernel::Secular => 1.0 / 5.0,
            // (9/4)·⟨sin²θ cos²θ⟩ = (9/4)·(2/15)
            AngularKernel::Transverse => 3.0 / 10.0,
        }
    }

    /// ∫_x^1 f²(c) dc, used for closed-surface (half-space cap) integrals.
    pub fn square_cos_integral(self, x: f64) -> f64 {
        match self {
            AngularKernel::Isotropic => 1.0 - x,
            AngularKernel::Secular => {
                0.25 * (4.0 / 5.0 - 9.0 * x.powi(5) / 5.0 + 2.0 * x.powi(3) - x)
            }
            AngularKernel::Transverse => {
                2.25 * (2.0 / 15.0 - x.powi(3) / 3.0 + x.powi(5) / 5.0)
            }
        }
    }
}

/// Point-dipole hyperfine coupling model A(R) = C·f(θ)/max(|R|, r_min)³.
///
/// The prefactor C is in rad·s⁻¹·nm³; the cutoff clamps the coupling below
/// r_min so A (and u = A²/2Γ2) stay finite at the probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingModel {
    /// Prefactor C, rad·s⁻¹·nm³.
    pub prefactor: f64,
    pub kernel: AngularKernel,
    /// Exclusion radius, nm.
    pub cutoff_radius_nm: f64,
}

impl CouplingModel {
    pub fn new(prefactor: f64, kernel: AngularKernel, cutoff_radius_nm: f64) -> Result<Self> {
        if !(prefactor >= 0.0) || !prefactor.is_finite() {
            return Err(Error::invalid("coupling.prefactor", "must be >= 0 and finite"));
        }
        if !(cutoff_radius_nm > 0.0) {
            return Err(Error::invalid("coupling.cutoff_radius_nm", "must be > 0"));
        }
        Ok(CouplingModel {
            prefactor,
            kernel,
            cutoff_radius_nm,
        })
    }

    /// Magnetic point-dipole prefactor μ₀ħγ_NV γ_n/4π (angular units),
    /// converted to rad·s⁻¹·nm³.
    pub fn dipolar_prefactor(gamma_probe_hz_per_t: f64, gamma_target_hz_per_t: f64) -> f64 {
        (MU0_OVER_4PI
            * HBAR
            * cycles_to_angular(gamma_probe_hz_per_t)
            * cycles_to_angular(gamma_target_hz_per_t)
            * NM3_PER_M3)
            .abs()
    }

    /// Dipolar model between an NV probe and a target species with the
    /// default in-diamond cutoff.
    pub fn dipolar(probe: &NvProbe, species: &SpinSpecies, kernel: AngularKernel) -> Result<Self> {
        Self::new(
            Self::dipolar_prefactor(probe.gamma_hz_per_t, species.gamma_hz_per_t()),
            kernel,
            DIAMOND_BOND_NM,
        )
    }

    pub fn with_cutoff(mut self, cutoff_radius_nm: f64) -> Result<Self> {
        if !(cutoff_radius_nm > 0.0) {
            return Err(Error::invalid("coupling.cutoff_radius_nm", "must be > 0"));
        }
        self.cutoff_radius_nm = cutoff_radius_nm;
        Ok(self)
    }
}

/// Hyperfine coupling A(R) in rad/s for a displacement R (nm) from the probe.
pub fn hyperfine_coupling(model: &CouplingModel, r: [f64; 3], axis: [f64; 3]) -> f64 {
    let r_norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let cos_theta = if r_norm > 0.0 {
        ((r[0] * axis[0] + r[1] * axis[1] + r[2] * axis[2]) / r_norm).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let reff = r_norm.max(model.cutoff_radius_nm);
    model.prefactor * model.kernel.eval(cos_theta) / (reff * reff * reff)
}

/// Pointwise cooling coefficient u(R) = A²(R)/2Γ2, s⁻¹.
pub fn cooling_coefficient(model: &CouplingModel, probe: &NvProbe, r: [f64; 3]) -> f64 {
    let a = hyperfine_coupling(model, r, probe.axis);
    a * a / (2.0 * probe.dephasing_rate)
}

/// Cooling coefficient averaged over the sphere at radius r,
/// ⟨u⟩(r) = C²⟨f²⟩ / (2Γ2·max(r, r_min)⁶).
pub fn angular_averaged_cooling(model: &CouplingModel, probe: &NvProbe, r_nm: f64) -> f64 {
    let reff = r_nm.max(model.cutoff_radius_nm);
    let r3 = reff * reff * reff;
    model.prefactor * model.prefactor * model.kernel.mean_square()
        / (2.0 * probe.dephasing_rate * r3 * r3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::GAMMA_H1_HZ_PER_T;

    fn h1_model(kernel: AngularKernel) -> CouplingModel {
        CouplingModel::dipolar(&NvProbe::default(), &SpinSpecies::hydrogen_1(), kernel).unwrap()
    }

    #[test]
    fn transverse_vanishes_on_axis() {
        let m = h1_model(AngularKernel::Transverse);
        for r in [1.0, 5.0, 50.0] {
            assert_eq!(hyperfine_coupling(&m, [0.0, 0.0, r], [0.0, 0.0, 1.0]), 0.0);
        }
    }

    #[test]
    fn inverse_cube_scaling() {
        for kernel in [
            AngularKernel::Isotropic,
            AngularKernel::Secular,
            AngularKernel::Transverse,
        ] {
            let m = h1_model(kernel);
            let axis = [0.6, 0.0, 0.8];
            let r = [1.3, -2.1, 0.7];
            let r2 = [2.0 * r[0], 2.0 * r[1], 2.0 * r[2]];
            let a1 = hyperfine_coupling(&m, r, axis);
            let a2 = hyperfine_coupling(&m, r2, axis);
            assert!((a2 - a1 / 8.0).abs() <= 1e-12 * a1.abs().max(1e-300));
        }
    }

    #[test]
    fn transverse_45_degrees_matches_direct_evaluation() {
        // independent evaluation: C·(3/2)·sin45·cos45 / 10³ = C·(3/4)/1000
        let m = h1_model(AngularKernel::Transverse);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let a = hyperfine_coupling(&m, [0.0, 0.0, 10.0], [inv_sqrt2, 0.0, inv_sqrt2]);
        let expected_c = 1.0e-7
            * 1.054571817e-34
            * (std::f64::consts::TAU * 28.02495e9)
            * (std::f64::consts::TAU * GAMMA_H1_HZ_PER_T)
            * 1.0e27;
        let expected = expected_c * 0.75 / 1000.0;
        assert!((a - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn cooling_zero_coupling_and_gamma2_scaling() {
        let mut probe = NvProbe::default();
        let m = h1_model(AngularKernel::Transverse);
        // A = 0 on axis -> u = 0
        assert_eq!(cooling_coefficient(&m, &probe, [0.0, 0.0, 10.0]), 0.0);
        let r = [3.0, 0.0, 4.0];
        let u1 = cooling_coefficient(&m, &probe, r);
        probe.dephasing_rate *= 2.0;
        let u2 = cooling_coefficient(&m, &probe, r);
        assert!((u2 - 0.5 * u1).abs() < 1e-12 * u1);
    }

    #[test]
    fn cooling_spot_value_matches_formula_oracle() {
        let probe = NvProbe::default();
        let m = h1_model(AngularKernel::Transverse);
        // spot check at R = (7, 0, 7)/sqrt(2)*sqrt(2)... use R at 45 degrees, |R| = 10
        let s = 10.0 / 2f64.sqrt();
        let r = [s, 0.0, s];
        let u = cooling_coefficient(&m, &probe, r);
        let a = m.prefactor * 0.75 / 1000.0;
        let expected = a * a / (2.0 * probe.dephasing_rate);
        assert!((u - expected).abs() < 1e-10 * expected);
    }

    /// Quadrature oracle for the spherical average of u, independent of the
    /// closed forms in `AngularKernel::mean_square`.
    fn quadrature_average(model: &CouplingModel, probe: &NvProbe, r: f64) -> f64 {
        let n = 20_000;
        let mut sum = 0.0;
        for i in 0..n {
            let theta = (i as f64 + 0.5) * std::f64::consts::PI / n as f64;
            let (s, c) = theta.sin_cos();
            let u = cooling_coefficient(model, probe, [r * s, 0.0, r * c]);
            sum += u * s;
        }
        0.5 * sum * std::f64::consts::PI / n as f64
    }

    #[test]
    fn angular_average_matches_quadrature() {
        let probe = NvProbe::default();
        for kernel in [
            AngularKernel::Isotropic,
            AngularKernel::Secular,
            AngularKernel::Transverse,
        ] {
            let m = h1_model(kernel);
            for r in [1.0, 10.0] {
                let closed = angular_averaged_cooling(&m, &probe, r);
                let quad = quadrature_average(&m, &probe, r);
                assert!(
                    (closed - quad).abs() < 1e-6 * closed,
                    "{kernel:?} r={r}: closed={closed} quad={quad}"
                );
            }
        }
    }

    #[test]
    fn isotropic_average_equals_pointwise() {
        let probe = NvProbe::default();
        let m = h1_model(AngularKernel::Isotropic);
        let u_avg = angular_averaged_cooling(&m, &probe, 5.0);
        let u_pt = cooling_coefficient(&m, &probe, [0.0, 3.0, 4.0]);
        assert!((u_avg - u_pt).abs() < 1e-12 * u_pt);
    }

    #[test]
    fn clamp_below_cutoff() {
        let m = h1_model(AngularKernel::Isotropic);
        let at_cutoff = hyperfine_coupling(&m, [m.cutoff_radius_nm, 0.0, 0.0], [0.0, 0.0, 1.0]);
        let inside = hyperfine_coupling(&m, [m.cutoff_radius_nm / 10.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        assert_eq!(at_cutoff, inside);
        assert!(hyperfine_coupling(&m, [0.0; 3], [0.0, 0.0, 1.0]).is_finite());
    }
}
