use spinlab_core::{
    angular_averaged_cooling, cooling_coefficient, CouplingModel, NvProbe, TargetEnsemble,
};

use crate::grid::Grid;

/// Per-cell cooling coefficient u(R) in s⁻¹.
///
/// Radial grids use the angle-averaged coefficient; Cartesian grids evaluate
/// u pointwise at cell centers. Cells outside the ensemble geometry get
/// u = 0 (on Cartesian grids the mask normally excludes them already).
pub fn cooling_field(
    grid: &Grid,
    model: &CouplingModel,
    probe: &NvProbe,
    ensemble: &TargetEnsemble,
) -> Vec<f64> {
    if let Some(radii) = grid.radial_centers() {
        radii
            .iter()
            .map(|&r| angular_averaged_cooling(model, probe, r))
            .collect()
    } else {
        grid.centers()
            .iter()
            .map(|&c| {
                if ensemble.geometry.contains(c, probe.depth_nm) {
                    cooling_coefficient(model, probe, c)
                } else {
                    0.0
                }
            })
            .collect()
    }
}
