//! Spin physics primitives for NV-probe hyperpolarisation simulations.
//!
//! Unit conventions used throughout the workspace:
//! - lengths in nm, times in s, rates in s⁻¹
//! - magnetic fields in tesla
//! - gyromagnetic ratios in Hz/T (cycles, not angular)
//! - hyperfine couplings and detunings in angular units (rad/s); the
//!   cycles → angular conversion is confined to [`units::cycles_to_angular`].

pub mod constants;
pub mod coupling;
pub mod ensemble;
pub mod probe;
pub mod species;
pub mod thermal;
pub mod units;

mod error;

pub use coupling::{
    angular_averaged_cooling, cooling_coefficient, hyperfine_coupling, AngularKernel,
    CouplingModel,
};
pub use ensemble::{Geometry, TargetEnsemble};
pub use error::Error;
pub use probe::{larmor_frequency, nv_transition_frequency, resonance_field, NvProbe};
pub use species::SpinSpecies;
pub use thermal::{equivalent_field, thermal_polarization};

pub type Result<T> = std::result::Result<T, Error>;
