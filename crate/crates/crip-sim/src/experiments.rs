//! Bundled, named experiment configurations.

use crate::config::{parse_config, ExperimentConfig};
use crate::error::Error;

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    pub toml: &'static str,
}

/// Alphabetical registry; every entry parses and runs without extra
/// arguments.
pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "fig2c",
        description: "13C polarization front in diamond: radial profiles at increasing pumping times",
        toml: include_str!("../experiments/fig2c.toml"),
    },
    Experiment {
        name: "fig3_ratio",
        description: "1H in PMMA: steady-state field, unpolarized/steady cross-relaxation ratio and spin count",
        toml: include_str!("../experiments/fig3_ratio.toml"),
    },
    Experiment {
        name: "fig4b",
        description: "Flow-cell polarization kinetics for the bundled contrast agents",
        toml: include_str!("../experiments/fig4b.toml"),
    },
    Experiment {
        name: "fig4c",
        description: "Post-dilution delivery rate of a 10-cell stack versus polarization target",
        toml: include_str!("../experiments/fig4c.toml"),
    },
    Experiment {
        name: "oracle_compare",
        description: "Discrete spin-bath oracle versus the continuum solver on a closed shell",
        toml: include_str!("../experiments/oracle_compare.toml"),
    },
];

pub fn lookup(name: &str) -> Result<ExperimentConfig, Error> {
    let e = EXPERIMENTS
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownExperiment(name.to_string()))?;
    parse_config(e.toml)
}
