//! Measurable quantities derived from polarization fields: the hyperfine
//! field variance at the probe, cross-relaxation rates and spectra, PL decay
//! curves and their fits, polarized-spin counts and enhancement factors.

mod error;
mod fit;
mod rates;
mod variance;

pub use error::Error;
pub use fit::{fit_rate, RateFit};
pub use rates::{
    cross_relaxation_rate, relaxation_curve, spectrum, total_rate, CrSpectrum, RelaxationCurve,
    PL_AMPLITUDE, PL_BASELINE,
};
pub use variance::{
    enhancement_factor, hyperfine_variance, mean_region_threshold, polarized_spin_count, Region,
};

pub type Result<T> = std::result::Result<T, Error>;
