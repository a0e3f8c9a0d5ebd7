//! Finite-volume discretization and solvers for the probe-driven
//! reaction-diffusion equation
//!
//! ```text
//! dP/dt = beta * Laplacian(P) - (u(R) + G_SL) * P + u(R)
//! ```
//!
//! on 1D spherically symmetric (angle-averaged) and 3D Cartesian grids.

pub mod cooling;
pub mod field;
pub mod grid;
pub mod solver;

mod cg;
mod error;

pub use cooling::cooling_field;
pub use error::Error;
pub use field::{init_field, PolarizationField};
pub use grid::{Grid, GridSpec, MaskRegion, Spacing};
pub use solver::{
    diffusion_update, evolve, reaction_update, steady_state, step, BoundaryKind, CripSystem,
    Scheme, SolverConfig,
};

pub type Result<T> = std::result::Result<T, Error>;
