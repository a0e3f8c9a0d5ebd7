use serde::{Deserialize, Serialize};

use crate::constants;
use crate::{Error, Result};

/// A nuclear (or NV electronic) spin species with a signed gyromagnetic
/// ratio in Hz/T (cycles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSpecies {
    name: String,
    gamma_hz_per_t: f64,
}

impl SpinSpecies {
    pub fn new(name: impl Into<String>, gamma_hz_per_t: f64) -> Result<Self> {
        if gamma_hz_per_t == 0.0 || !gamma_hz_per_t.is_finite() {
            return Err(Error::invalid(
                "species.gamma",
                format!("gamma must be nonzero and finite, got {gamma_hz_per_t}"),
            ));
        }
        Ok(SpinSpecies {
            name: name.into(),
            gamma_hz_per_t,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Signed gyromagnetic ratio in Hz/T.
    pub fn gamma_hz_per_t(&self) -> f64 {
        self.gamma_hz_per_t
    }

    pub fn hydrogen_1() -> Self {
        SpinSpecies {
            name: "1H".into(),
            gamma_hz_per_t: constants::GAMMA_H1_HZ_PER_T,
        }
    }

    pub fn carbon_13() -> Self {
        SpinSpecies {
            name: "13C".into(),
            gamma_hz_per_t: constants::GAMMA_C13_HZ_PER_T,
        }
    }

    pub fn nitrogen_15() -> Self {
        SpinSpecies {
            name: "15N".into(),
            gamma_hz_per_t: constants::GAMMA_N15_HZ_PER_T,
        }
    }

    pub fn nv_electron() -> Self {
        SpinSpecies {
            name: "NV".into(),
            gamma_hz_per_t: constants::GAMMA_NV_HZ_PER_T,
        }
    }

    /// Built-in registry. Lookup by name is total over this set.
    pub fn registry() -> Vec<SpinSpecies> {
        vec![
            Self::hydrogen_1(),
            Self::carbon_13(),
            Self::nitrogen_15(),
            Self::nv_electron(),
        ]
    }

    pub fn lookup(name: &str) -> Result<SpinSpecies> {
        Self::registry()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSpecies(name.to_string()))
    }
}
