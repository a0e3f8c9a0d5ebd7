//! Physical constants (SI) and default spin parameters.

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// mu0 / 4pi, T·m/A.
pub const MU0_OVER_4PI: f64 = 1.0e-7;

/// Avogadro constant, mol⁻¹.
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// nm³ per m³.
pub const NM3_PER_M3: f64 = 1.0e27;

/// NV ground-state zero-field splitting, Hz.
pub const NV_ZERO_FIELD_SPLITTING_HZ: f64 = 2.870e9;

/// NV electron gyromagnetic ratio, Hz/T.
pub const GAMMA_NV_HZ_PER_T: f64 = 28.024_95e9;

/// ¹H gyromagnetic ratio, Hz/T.
pub const GAMMA_H1_HZ_PER_T: f64 = 42.577_5e6;

/// ¹³C gyromagnetic ratio, Hz/T.
pub const GAMMA_C13_HZ_PER_T: f64 = 10.708_4e6;

/// ¹⁵N gyromagnetic ratio, Hz/T (negative).
pub const GAMMA_N15_HZ_PER_T: f64 = -4.316_3e6;

/// Diamond nearest-neighbour bond length, nm. Default coupling cutoff for
/// in-diamond ensembles.
pub const DIAMOND_BOND_NM: f64 = 0.154;

/// Carbon number density of diamond, nm⁻³.
pub const DIAMOND_CARBON_DENSITY_PER_NM3: f64 = 176.0;
