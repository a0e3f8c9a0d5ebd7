use crip_pde::PolarizationField;
use spinlab_core::units::cycles_to_angular;
use spinlab_core::{larmor_frequency, resonance_field, CouplingModel, NvProbe, TargetEnsemble};

use crate::variance::hyperfine_variance;
use crate::{Error, Result};

/// Default PL contrast parameters for synthesized curves; the physical
/// contrast depends on collection optics and is out of scope.
pub const PL_BASELINE: f64 = 1.0;
pub const PL_AMPLITUDE: f64 = 0.1;

/// Probe-induced cross-relaxation rate (s⁻¹) at a detuning (rad/s) from the
/// target Larmor frequency: Γ_CR = A_P²·Γ2 / (2Γ2² + 2δ²), a Lorentzian of
/// half-width Γ2.
pub fn cross_relaxation_rate(a_p2: f64, gamma2: f64, detuning: f64) -> f64 {
    a_p2 * gamma2 / (2.0 * gamma2 * gamma2 + 2.0 * detuning * detuning)
}

/// Total relaxation rate Γ_tot = Γ_bg + Γ_CR.
pub fn total_rate(gamma_cr: f64, probe: &NvProbe) -> f64 {
    probe.background_rate + gamma_cr
}

/// A synthesized PL decay curve signal(τ) = baseline + amplitude·e^(−Γ_tot·τ).
#[derive(Debug, Clone)]
pub struct RelaxationCurve {
    pub taus: Vec<f64>,
    pub signal: Vec<f64>,
    pub rate: f64,
    pub baseline: f64,
    pub amplitude: f64,
}

pub fn relaxation_curve(
    gamma_tot: f64,
    taus: &[f64],
    baseline: f64,
    amplitude: f64,
) -> Result<RelaxationCurve> {
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("taus", "must be strictly increasing"));
    }
    let signal = taus
        .iter()
        .map(|&t| baseline + amplitude * (-gamma_tot * t).exp())
        .collect();
    Ok(RelaxationCurve {
        taus: taus.to_vec(),
        signal,
        rate: gamma_tot,
        baseline,
        amplitude,
    })
}

/// Cross-relaxation spectrum: total rate and PL contrast versus the probe
/// transition frequency (Hz).
#[derive(Debug, Clone)]
pub struct CrSpectrum {
    pub probe_frequencies_hz: Vec<f64>,
    pub rates: Vec<f64>,
    pub pl: Vec<f64>,
    /// Target Larmor frequency at the resonance field (Hz) — the peak center.
    pub center_frequency_hz: f64,
}

/// Scan the probe frequency across the target resonance at B = B* and
/// evaluate Γ_tot(ω) and the PL contrast at a fixed sequence time.
pub fn spectrum(
    field: &PolarizationField,
    ensemble: &TargetEnsemble,
    model: &CouplingModel,
    probe: &NvProbe,
    omega_grid_hz: &[f64],
    tau_fixed: f64,
) -> Result<CrSpectrum> {
    if omega_grid_hz.is_empty() {
        return Err(Error::invalid("omega_grid_hz", "must be non-empty"));
    }
    if !(tau_fixed >= 0.0) {
        return Err(Error::invalid("tau_fixed", "must be >= 0"));
    }
    let b_star = resonance_field(probe, &ensemble.species)?;
    let omega_n = larmor_frequency(&ensemble.species, b_star);
    let a_p2 = hyperfine_variance(field, ensemble, model, probe);
    let mut rates = Vec::with_capacity(omega_grid_hz.len());
    let mut pl = Vec::with_capacity(omega_grid_hz.len());
    for &omega in omega_grid_hz {
        let detuning = cycles_to_angular(omega - omega_n);
        let g = total_rate(
            cross_relaxation_rate(a_p2, probe.dephasing_rate, detuning),
            probe,
        );
        rates.push(g);
        pl.push(PL_BASELINE + PL_AMPLITUDE * (-g * tau_fixed).exp());
    }
    Ok(CrSpectrum {
        probe_frequencies_hz: omega_grid_hz.to_vec(),
        rates,
        pl,
        center_frequency_hz: omega_n,
    })
}
