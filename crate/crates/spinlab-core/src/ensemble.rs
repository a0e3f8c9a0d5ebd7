use serde::{Deserialize, Serialize};

use crate::species::SpinSpecies;
use crate::{Error, Result};

/// Spatial region occupied by the target spins, in probe-centred coordinates
/// (the NV sits at the origin, the diamond surface is the plane z = depth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum Geometry {
    /// Spins everywhere around the probe (e.g. ¹³C in diamond).
    FullSpace,
    /// Spins fill z > depth (e.g. PMMA on the surface).
    HalfSpaceAboveSurface,
    /// Spins fill z_lo < z < z_hi.
    Slab { z_lo_nm: f64, z_hi_nm: f64 },
}

impl Geometry {
    /// Whether a point (nm, probe-centred) lies inside the ensemble region.
    pub fn contains(&self, point: [f64; 3], probe_depth_nm: f64) -> bool {
        match *self {
            Geometry::FullSpace => true,
            Geometry::HalfSpaceAboveSurface => point[2] > probe_depth_nm,
            Geometry::Slab { z_lo_nm, z_hi_nm } => point[2] > z_lo_nm && point[2] < z_hi_nm,
        }
    }

    pub fn has_positive_volume(&self) -> bool {
        match *self {
            Geometry::FullSpace | Geometry::HalfSpaceAboveSurface => true,
            Geometry::Slab { z_lo_nm, z_hi_nm } => z_hi_nm > z_lo_nm,
        }
    }
}

/// A dipolar spin bath: species, density, effective polarisation diffusion,
/// spin-lattice relaxation and geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEnsemble {
    pub species: SpinSpecies,
    /// Number density n_t, nm⁻³.
    pub number_density_per_nm3: f64,
    /// Effective polarisation diffusion coefficient β, nm²/s.
    pub diffusion_nm2_per_s: f64,
    /// Spin-lattice relaxation rate Γ_SL, s⁻¹.
    pub spin_lattice_rate: f64,
    pub geometry: Geometry,
}

impl TargetEnsemble {
    pub fn new(
        species: SpinSpecies,
        number_density_per_nm3: f64,
        diffusion_nm2_per_s: f64,
        spin_lattice_rate: f64,
        geometry: Geometry,
    ) -> Result<Self> {
        if !(number_density_per_nm3 > 0.0) {
            return Err(Error::invalid("ensemble.number_density_per_nm3", "must be > 0"));
        }
        if !(diffusion_nm2_per_s >= 0.0) {
            return Err(Error::invalid("ensemble.diffusion_nm2_per_s", "must be >= 0"));
        }
        if !(spin_lattice_rate >= 0.0) {
            return Err(Error::invalid("ensemble.spin_lattice_rate", "must be >= 0"));
        }
        if !geometry.has_positive_volume() {
            return Err(Error::invalid("ensemble.geometry", "region has zero volume"));
        }
        Ok(TargetEnsemble {
            species,
            number_density_per_nm3,
            diffusion_nm2_per_s,
            spin_lattice_rate,
            geometry,
        })
    }

    /// The intrinsic 1.1% ¹³C bath of diamond.
    pub fn carbon_13_in_diamond() -> Self {
        TargetEnsemble {
            species: SpinSpecies::carbon_13(),
            number_density_per_nm3: 0.011 * crate::constants::DIAMOND_CARBON_DENSITY_PER_NM3,
            diffusion_nm2_per_s: 0.0335,
            spin_lattice_rate: 0.0,
            geometry: Geometry::FullSpace,
        }
    }

    /// ¹H in PMMA above the diamond surface (density from C₅H₈O₂ at
    /// 1.18 g/cm³).
    pub fn hydrogen_in_pmma() -> Self {
        TargetEnsemble {
            species: SpinSpecies::hydrogen_1(),
            number_density_per_nm3: 57.0,
            diffusion_nm2_per_s: 781.0,
            spin_lattice_rate: 1.0,
            geometry: Geometry::HalfSpaceAboveSurface,
        }
    }
}
