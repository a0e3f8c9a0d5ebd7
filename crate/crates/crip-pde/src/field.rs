use std::sync::Arc;

use crate::grid::Grid;
use crate::{Error, Result};

/// Discretized polarization field P(R, t) on a grid.
#[derive(Debug, Clone)]
pub struct PolarizationField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub time: f64,
}

/// All cells set to `p0`, time zero.
pub fn init_field(grid: Arc<Grid>, p0: f64) -> Result<PolarizationField> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::invalid("p0", format!("must be in [0, 1], got {p0}")));
    }
    let n = grid.n_cells();
    Ok(PolarizationField {
        grid,
        values: vec![p0; n],
        time: 0.0,
    })
}

impl PolarizationField {
    /// Volume integral of P, nm³.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.volumes())
            .map(|(p, v)| p * v)
            .sum()
    }

    /// Volume-weighted mean polarization.
    pub fn mean(&self) -> f64 {
        self.integral() / self.grid.total_volume()
    }

    pub(crate) fn assert_bounded(&self) {
        debug_assert!(
            self.values.iter().all(|&p| (-1e-9..=1.0 + 1e-9).contains(&p)),
            "polarization left [0, 1]"
        );
    }

    /// Whether the field is well resolved at the outer boundary: the largest
    /// boundary-adjacent gradient must stay below 1e-3 of the peak gradient.
    pub fn boundary_resolved(&self) -> bool {
        let mut max_grad: f64 = 0.0;
        for f in self.grid.faces() {
            let d = (self.values[f.a as usize] - self.values[f.b as usize]).abs();
            max_grad = max_grad.max(d);
        }
        if max_grad == 0.0 {
            return true;
        }
        let boundary_cells: std::collections::HashSet<u32> =
            self.grid.outer_faces().iter().map(|&(c, _)| c).collect();
        let mut max_boundary: f64 = 0.0;
        for f in self.grid.faces() {
            if boundary_cells.contains(&f.a) || boundary_cells.contains(&f.b) {
                let d = (self.values[f.a as usize] - self.values[f.b as usize]).abs();
                max_boundary = max_boundary.max(d);
            }
        }
        max_boundary < 1e-3 * max_grad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, Spacing};

    fn grid() -> Arc<Grid> {
        Arc::new(
            Grid::build(GridSpec::Radial1D {
                r_min_nm: 1.0,
                r_max_nm: 50.0,
                n_cells: 32,
                spacing: Spacing::Linear,
            })
            .unwrap(),
        )
    }

    #[test]
    fn init_levels() {
        let f0 = init_field(grid(), 0.0).unwrap();
        assert!(f0.values.iter().all(|&p| p == 0.0));
        assert_eq!(f0.time, 0.0);
        let f1 = init_field(grid(), 1.0).unwrap();
        assert_eq!(f1.mean(), 1.0);
        let fh = init_field(grid(), 0.5).unwrap();
        assert!((fh.mean() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(init_field(grid(), -0.1).is_err());
        assert!(init_field(grid(), 1.1).is_err());
    }
}
