use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Region predicate for masking Cartesian cells that lie outside the target
/// ensemble (e.g. inside the diamond for an external target).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum MaskRegion {
    /// Keep cells with z > z_nm.
    AboveZ { z_nm: f64 },
    /// Keep cells with z_lo_nm < z < z_hi_nm.
    Slab { z_lo_nm: f64, z_hi_nm: f64 },
}

impl MaskRegion {
    pub fn keeps(&self, center: [f64; 3]) -> bool {
        match *self {
            MaskRegion::AboveZ { z_nm } => center[2] > z_nm,
            MaskRegion::Slab { z_lo_nm, z_hi_nm } => center[2] > z_lo_nm && center[2] < z_hi_nm,
        }
    }
}

/// Declarative grid description. Coordinates are probe-centred (NV at the
/// origin), lengths in nm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", rename_all_fields = "kebab-case", tag = "type")]
pub enum GridSpec {
    /// Spherically symmetric shells between r_min and r_max.
    #[serde(rename = "radial")]
    Radial1D {
        r_min_nm: f64,
        r_max_nm: f64,
        n_cells: usize,
        spacing: Spacing,
    },
    /// Uniform box grid; cells whose centers fall outside the mask are
    /// excluded from the domain.
    #[serde(rename = "cartesian")]
    Cartesian3D {
        lower_nm: [f64; 3],
        upper_nm: [f64; 3],
        cell_size_nm: f64,
        mask: Option<MaskRegion>,
    },
}

/// Interior face between two cells. `conductance` is face area over
/// center-to-center distance (nm), so the diffusive flux from b to a is
/// `beta * conductance * (P_b - P_a)` in nm³/s.
#[derive(Debug, Clone, Copy)]
pub struct Face {
    pub a: u32,
    pub b: u32,
    pub conductance: f64,
}

/// Discretized finite-volume grid: cell volumes, centers and face
/// conductances, plus the faces on the outer domain boundary.
#[derive(Debug, Clone)]
pub struct Grid {
    spec: GridSpec,
    volumes: Vec<f64>,
    centers: Vec<[f64; 3]>,
    faces: Vec<Face>,
    /// (cell, conductance) pairs for faces on the far/outer domain boundary;
    /// used for FixedZero boundaries and the boundary-resolution check.
    outer_faces: Vec<(u32, f64)>,
    radial_centers: Option<Vec<f64>>,
}

impl Grid {
    pub fn build(spec: GridSpec) -> Result<Self> {
        match spec {
            GridSpec::Radial1D {
                r_min_nm,
                r_max_nm,
                n_cells,
                spacing,
            } => build_radial(spec.clone(), r_min_nm, r_max_nm, n_cells, spacing),
            GridSpec::Cartesian3D {
                lower_nm,
                upper_nm,
                cell_size_nm,
                mask,
            } => build_cartesian(spec.clone(), lower_nm, upper_nm, cell_size_nm, mask),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n_cells(&self) -> usize {
        self.volumes.len()
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn outer_faces(&self) -> &[(u32, f64)] {
        &self.outer_faces
    }

    /// Shell center radii for radial grids.
    pub fn radial_centers(&self) -> Option<&[f64]> {
        self.radial_centers.as_deref()
    }

    pub fn is_radial(&self) -> bool {
        self.radial_centers.is_some()
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }
}

fn build_radial(
    spec: GridSpec,
    r_min: f64,
    r_max: f64,
    n: usize,
    spacing: Spacing,
) -> Result<Grid> {
    if !(r_min > 0.0) {
        return Err(Error::invalid("grid.r_min_nm", "must be > 0"));
    }
    if !(r_max > r_min) {
        return Err(Error::invalid("grid.r_max_nm", "must exceed r_min_nm"));
    }
    if n < 8 {
        return Err(Error::invalid("grid.n_cells", "must be >= 8"));
    }

    let face_radii: Vec<f64> = match spacing {
        Spacing::Linear => (0..=n)
            .map(|i| r_min + (r_max - r_min) * i as f64 / n as f64)
            .collect(),
        Spacing::Logarithmic => {
            let ratio = (r_max / r_min).ln();
            (0..=n)
                .map(|i| r_min * (ratio * i as f64 / n as f64).exp())
                .collect()
        }
    };

    let mut volumes = Vec::with_capacity(n);
    let mut radial = Vec::with_capacity(n);
    for w in face_radii.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        volumes.push(4.0 / 3.0 * std::f64::consts::PI * (hi.powi(3) - lo.powi(3)));
        radial.push(match spacing {
            Spacing::Linear => 0.5 * (lo + hi),
            Spacing::Logarithmic => (lo * hi).sqrt(),
        });
    }

    let mut faces = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let rf = face_radii[i + 1];
        let area = 4.0 * std::f64::consts::PI * rf * rf;
        faces.push(Face {
            a: i as u32,
            b: (i + 1) as u32,
            conductance: area / (radial[i + 1] - radial[i]),
        });
    }

    // single outer boundary face at r_max; the inner face is always zero-flux
    let outer_area = 4.0 * std::f64::consts::PI * r_max * r_max;
    let outer = vec![(
        (n - 1) as u32,
        outer_area / (r_max - radial[n - 1]),
    )];

    let centers = radial.iter().map(|&r| [r, 0.0, 0.0]).collect();
    Ok(Grid {
        spec,
        volumes,
        centers,
        faces,
        outer_faces: outer,
        radial_centers: Some(radial),
    })
}

fn build_cartesian(
    spec: GridSpec,
    lower: [f64; 3],
    upper: [f64; 3],
    h: f64,
    mask: Option<MaskRegion>,
) -> Result<Grid> {
    if !(h > 0.0) {
        return Err(Error::invalid("grid.cell_size_nm", "must be > 0"));
    }
    let mut dims = [0usize; 3];
    for d in 0..3 {
        if !(upper[d] > lower[d]) {
            return Err(Error::invalid("grid.upper_nm", "must exceed lower_nm componentwise"));
        }
        let n = ((upper[d] - lower[d]) / h).round() as i64;
        if n < 1 {
            return Err(Error::invalid("grid.cell_size_nm", "no cells fit in the box"));
        }
        dims[d] = n as usize;
    }

    let (nx, ny, nz) = (dims[0], dims[1], dims[2]);
    let total = nx * ny * nz;
    let mut index = vec![u32::MAX; total];
    let mut centers = Vec::new();
    let flat = |i: usize, j: usize, k: usize| (k * ny + j) * nx + i;

    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = [
                    lower[0] + (i as f64 + 0.5) * h,
                    lower[1] + (j as f64 + 0.5) * h,
                    lower[2] + (k as f64 + 0.5) * h,
                ];
                if mask.map_or(true, |m| m.keeps(c)) {
                    index[flat(i, j, k)] = centers.len() as u32;
                    centers.push(c);
                }
            }
        }
    }

    if centers.is_empty() {
        return Err(Error::invalid("grid.mask", "mask excludes every cell"));
    }

    let n_cells = centers.len();
    let volumes = vec![h * h * h; n_cells];
    let mut faces = Vec::new();
    let mut outer = Vec::new();
    // conductance per face: h^2 / h = h
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let a = index[flat(i, j, k)];
                if a == u32::MAX {
                    continue;
                }
                let neighbor = |ii: i64, jj: i64, kk: i64| -> Option<u32> {
                    if ii < 0 || jj < 0 || kk < 0 {
                        return None;
                    }
                    let (ii, jj, kk) = (ii as usize, jj as usize, kk as usize);
                    if ii >= nx || jj >= ny || kk >= nz {
                        return None;
                    }
                    let b = index[flat(ii, jj, kk)];
                    (b != u32::MAX).then_some(b)
                };
                // positive-direction neighbors define interior faces once
                for (di, dj, dk) in [(1i64, 0i64, 0i64), (0, 1, 0), (0, 0, 1)] {
                    if let Some(b) = neighbor(i as i64 + di, j as i64 + dj, k as i64 + dk) {
                        faces.push(Face { a, b, conductance: h });
                    }
                }
                // domain-boundary faces (not mask boundaries, which stay zero-flux)
                let on_domain_boundary = |ii: i64, jj: i64, kk: i64| {
                    ii < 0
                        || jj < 0
                        || kk < 0
                        || ii as usize >= nx
                        || jj as usize >= ny
                        || kk as usize >= nz
                };
                for (di, dj, dk) in [
                    (1i64, 0i64, 0i64),
                    (-1, 0, 0),
                    (0, 1, 0),
                    (0, -1, 0),
                    (0, 0, 1),
                    (0, 0, -1),
                ] {
                    let (ii, jj, kk) = (i as i64 + di, j as i64 + dj, k as i64 + dk);
                    if on_domain_boundary(ii, jj, kk) {
                        // ghost cell at distance h across a face of area h^2,
                        // center-to-face distance h/2 for Dirichlet
                        outer.push((a, 2.0 * h));
                    }
                }
            }
        }
    }

    Ok(Grid {
        spec,
        volumes,
        centers,
        faces,
        outer_faces: outer,
        radial_centers: None,
    })
}
