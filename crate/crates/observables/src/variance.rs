use crip_pde::PolarizationField;
use spinlab_core::{
    angular_averaged_cooling, hyperfine_coupling, thermal_polarization, CouplingModel, NvProbe,
    TargetEnsemble,
};

use crate::{Error, Result};

/// Per-cell mean-square coupling ⟨A²⟩ (rad²/s²): the spherical average on
/// radial grids, the pointwise value at cell centers on Cartesian grids
/// (zero outside the ensemble geometry).
fn mean_square_coupling(
    field: &PolarizationField,
    ensemble: &TargetEnsemble,
    model: &CouplingModel,
    probe: &NvProbe,
) -> Vec<f64> {
    if let Some(radii) = field.grid.radial_centers() {
        radii
            .iter()
            .map(|&r| 2.0 * probe.dephasing_rate * angular_averaged_cooling(model, probe, r))
            .collect()
    } else {
        field
            .grid
            .centers()
            .iter()
            .map(|&c| {
                if ensemble.geometry.contains(c, probe.depth_nm) {
                    let a = hyperfine_coupling(model, c, probe.axis);
                    a * a
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Total hyperfine field variance at the probe,
/// A_P² = (n_t/2)·Σ (1−P)·A²·V, in rad²/s².
///
/// Logs a warning when the boundary tail of the integrand exceeds 1% of the
/// total, indicating the grid does not extend far enough.
pub fn hyperfine_variance(
    field: &PolarizationField,
    ensemble: &TargetEnsemble,
    model: &CouplingModel,
    probe: &NvProbe,
) -> f64 {
    let a2 = mean_square_coupling(field, ensemble, model, probe);
    let mut total = 0.0;
    for ((&p, &a2), &v) in field.values.iter().zip(&a2).zip(field.grid.volumes()) {
        total += 0.5 * ensemble.number_density_per_nm3 * (1.0 - p) * a2 * v;
    }

    // boundary tail estimate: for radial grids the analytic r^-6 continuation
    // past r_max, for Cartesian grids the contribution of boundary cells
    let tail = if let Some(radii) = field.grid.radial_centers() {
        let last = field.values.len() - 1;
        let r_max = radii[last];
        0.5 * ensemble.number_density_per_nm3
            * (1.0 - field.values[last])
            * model.prefactor
            * model.prefactor
            * model.kernel.mean_square()
            * 4.0
            * std::f64::consts::PI
            / (3.0 * r_max.powi(3))
    } else {
        let mut boundary: Vec<bool> = vec![false; field.values.len()];
        for &(c, _) in field.grid.outer_faces() {
            boundary[c as usize] = true;
        }
        field
            .values
            .iter()
            .zip(&a2)
            .zip(field.grid.volumes())
            .zip(&boundary)
            .filter(|(_, &b)| b)
            .map(|(((&p, &a2), &v), _)| 0.5 * ensemble.number_density_per_nm3 * (1.0 - p) * a2 * v)
            .sum()
    };
    if total > 0.0 && tail > 0.01 * total {
        log::warn!(
            "hyperfine variance boundary tail is {:.1}% of the total; grid may be too small",
            100.0 * tail / total
        );
    }
    total
}

/// Number of target spins inside the region where P >= threshold.
pub fn polarized_spin_count(
    field: &PolarizationField,
    ensemble: &TargetEnsemble,
    threshold: f64,
) -> Result<f64> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid("threshold", "must be in (0, 1]"));
    }
    let volume: f64 = field
        .values
        .iter()
        .zip(field.grid.volumes())
        .filter(|(&p, _)| p >= threshold)
        .map(|(_, &v)| v)
        .sum();
    Ok(ensemble.number_density_per_nm3 * volume)
}

/// Threshold p* such that the superlevel set {P >= p*} has volume-weighted
/// mean polarization `target_mean`: the largest set whose mean still reaches
/// the target. Returns None when no cell reaches the target.
pub fn mean_region_threshold(field: &PolarizationField, target_mean: f64) -> Option<f64> {
    let mut cells: Vec<(f64, f64)> = field
        .values
        .iter()
        .zip(field.grid.volumes())
        .map(|(&p, &v)| (p, v))
        .collect();
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut vol = 0.0;
    let mut int = 0.0;
    let mut threshold = None;
    for (p, v) in cells {
        vol += v;
        int += p * v;
        if int / vol >= target_mean {
            threshold = Some(p);
        } else {
            break;
        }
    }
    threshold
}

/// Cell selector for region-restricted observables.
#[derive(Debug, Clone, Copy)]
pub enum Region {
    WholeGrid,
    /// Cells with |R| <= radius_nm.
    WithinRadius(f64),
    /// Cells with P >= threshold.
    AboveThreshold(f64),
}

impl Region {
    fn selects(&self, center: [f64; 3], p: f64) -> bool {
        match *self {
            Region::WholeGrid => true,
            Region::WithinRadius(r) => {
                center[0] * center[0] + center[1] * center[1] + center[2] * center[2] <= r * r
            }
            Region::AboveThreshold(t) => p >= t,
        }
    }
}

/// Mean polarization over `region` divided by the thermal polarization of
/// the ensemble species at field `b_tesla` and temperature `temperature_k`.
pub fn enhancement_factor(
    field: &PolarizationField,
    ensemble: &TargetEnsemble,
    region: Region,
    b_tesla: f64,
    temperature_k: f64,
) -> Result<f64> {
    let mut vol = 0.0;
    let mut int = 0.0;
    for ((&p, &v), &c) in field
        .values
        .iter()
        .zip(field.grid.volumes())
        .zip(field.grid.centers())
    {
        if region.selects(c, p) {
            vol += v;
            int += p * v;
        }
    }
    if vol == 0.0 {
        return Err(Error::EmptyRegion);
    }
    let thermal = thermal_polarization(&ensemble.species, b_tesla, temperature_k)?;
    if thermal == 0.0 {
        return Err(Error::invalid("b_tesla", "thermal polarization vanishes"));
    }
    Ok((int / vol) / thermal)
}
