//! The single cycles <-> angular conversion boundary.
//!
//! Gyromagnetic ratios, transition frequencies and Larmor frequencies are
//! stored in cyclic units (Hz, Hz/T). Hyperfine couplings, detunings and the
//! cooling coefficient live in angular units (rad/s). Every conversion between
//! the two goes through these functions so 2π factors cannot leak anywhere
//! else.

use std::f64::consts::TAU;

/// Convert a cyclic frequency (Hz) to angular units (rad/s).
#[inline]
pub fn cycles_to_angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Convert an angular frequency (rad/s) to cyclic units (Hz).
#[inline]
pub fn angular_to_cycles(omega_rad_per_s: f64) -> f64 {
    omega_rad_per_s / TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = 4.4e6;
        assert!((angular_to_cycles(cycles_to_angular(f)) - f).abs() < 1e-9);
    }
}
