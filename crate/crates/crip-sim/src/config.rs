//! Declarative experiment configuration: strict TOML schema, defaults and
//! exhaustive validation.

use crip_pde::{GridSpec, SolverConfig};
use serde::{Deserialize, Serialize};
use spinlab_core::{AngularKernel, CouplingModel, Geometry, NvProbe, SpinSpecies, TargetEnsemble};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Spectrum,
    RelaxCurve,
    Evolve,
    SteadyState,
    OracleCompare,
    Scaleup,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::RelaxCurve => "relax-curve",
            Kind::Evolve => "evolve",
            Kind::SteadyState => "steady-state",
            Kind::OracleCompare => "oracle-compare",
            Kind::Scaleup => "scaleup",
        }
    }
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub ensemble: Option<EnsembleSection>,
    pub grid: Option<GridSpec>,
    pub schedule: Option<ScheduleSection>,
    pub spectrum: Option<SpectrumSection>,
    pub relax: Option<RelaxSection>,
    pub oracle: Option<OracleSection>,
    pub scaleup: Option<ScaleupSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ProbeSection {
    #[serde(default = "d_zfs")]
    pub zero_field_splitting_hz: f64,
    #[serde(default = "d_gamma_nv")]
    pub gamma_hz_per_t: f64,
    #[serde(default = "d_gamma2")]
    pub dephasing_rate: f64,
    #[serde(default = "d_bg")]
    pub background_rate: f64,
    #[serde(default = "d_depth")]
    pub depth_nm: f64,
    #[serde(default = "d_axis")]
    pub axis: [f64; 3],
}

fn d_zfs() -> f64 {
    NvProbe::default().zero_field_splitting_hz
}
fn d_gamma_nv() -> f64 {
    NvProbe::default().gamma_hz_per_t
}
fn d_gamma2() -> f64 {
    NvProbe::default().dephasing_rate
}
fn d_bg() -> f64 {
    NvProbe::default().background_rate
}
fn d_depth() -> f64 {
    NvProbe::default().depth_nm
}
fn d_axis() -> [f64; 3] {
    NvProbe::default().axis
}

impl Default for ProbeSection {
    fn default() -> Self {
        let p = NvProbe::default();
        ProbeSection {
            zero_field_splitting_hz: p.zero_field_splitting_hz,
            gamma_hz_per_t: p.gamma_hz_per_t,
            dephasing_rate: p.dephasing_rate,
            background_rate: p.background_rate,
            depth_nm: p.depth_nm,
            axis: p.axis,
        }
    }
}

impl ProbeSection {
    pub fn to_probe(&self) -> Result<NvProbe, spinlab_core::Error> {
        NvProbe::new(
            self.zero_field_splitting_hz,
            self.gamma_hz_per_t,
            self.dephasing_rate,
            self.background_rate,
            self.depth_nm,
            self.axis,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CouplingSection {
    #[serde(default = "d_kernel")]
    pub kernel: AngularKernel,
    /// Defaults to the diamond bond length.
    #[serde(default = "d_cutoff")]
    pub cutoff_radius_nm: f64,
}

fn d_kernel() -> AngularKernel {
    AngularKernel::Transverse
}
fn d_cutoff() -> f64 {
    spinlab_core::constants::DIAMOND_BOND_NM
}

impl Default for CouplingSection {
    fn default() -> Self {
        CouplingSection {
            kernel: d_kernel(),
            cutoff_radius_nm: d_cutoff(),
        }
    }
}

impl CouplingSection {
    pub fn to_model(
        &self,
        probe: &NvProbe,
        species: &SpinSpecies,
    ) -> Result<CouplingModel, spinlab_core::Error> {
        CouplingModel::dipolar(probe, species, self.kernel)?.with_cutoff(self.cutoff_radius_nm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EnsembleSection {
    pub species: String,
    pub number_density_per_nm3: f64,
    #[serde(default)]
    pub diffusion_nm2_per_s: f64,
    #[serde(default)]
    pub spin_lattice_rate: f64,
    #[serde(default = "d_geometry")]
    pub geometry: Geometry,
}

fn d_geometry() -> Geometry {
    Geometry::FullSpace
}

impl EnsembleSection {
    pub fn to_ensemble(&self) -> Result<TargetEnsemble, spinlab_core::Error> {
        TargetEnsemble::new(
            SpinSpecies::lookup(&self.species)?,
            self.number_density_per_nm3,
            self.diffusion_nm2_per_s,
            self.spin_lattice_rate,
            self.geometry,
        )
    }
}

/// Wraps the solver settings with per-field defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolverSection {
    /// Initial step; 0 means "choose from the stiffest rate".
    #[serde(default)]
    pub dt: f64,
    #[serde(default = "d_growth")]
    pub dt_growth: f64,
    #[serde(default = "d_dt_max")]
    pub dt_max: f64,
    #[serde(default = "d_scheme")]
    pub scheme: crip_pde::Scheme,
    #[serde(default = "d_boundary")]
    pub boundary: crip_pde::BoundaryKind,
    #[serde(default = "d_tol")]
    pub steady_tolerance: f64,
    #[serde(default = "d_iters")]
    pub max_iterations: usize,
}

fn d_growth() -> f64 {
    SolverConfig::default().dt_growth
}
fn d_dt_max() -> f64 {
    SolverConfig::default().dt_max
}
fn d_scheme() -> crip_pde::Scheme {
    SolverConfig::default().scheme
}
fn d_boundary() -> crip_pde::BoundaryKind {
    SolverConfig::default().boundary
}
fn d_tol() -> f64 {
    SolverConfig::default().steady_tolerance
}
fn d_iters() -> usize {
    SolverConfig::default().max_iterations
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            dt: 0.0,
            dt_growth: d_growth(),
            dt_max: d_dt_max(),
            scheme: d_scheme(),
            boundary: d_boundary(),
            steady_tolerance: d_tol(),
            max_iterations: d_iters(),
        }
    }
}

impl SolverSection {
    /// Concrete solver settings; `suggested_dt` fills in dt = 0.
    pub fn to_solver_config(&self, suggested_dt: f64) -> SolverConfig {
        SolverConfig {
            dt: if self.dt > 0.0 { self.dt } else { suggested_dt },
            dt_growth: self.dt_growth,
            dt_max: self.dt_max,
            scheme: self.scheme,
            boundary: self.boundary,
            steady_tolerance: self.steady_tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScheduleSection {
    /// Snapshot times, strictly increasing; the run ends at the last one.
    pub times_s: Vec<f64>,
    #[serde(default)]
    pub initial_polarization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpectrumSection {
    /// Full scan width around the target Larmor frequency, Hz.
    #[serde(default = "d_span")]
    pub span_hz: f64,
    #[serde(default = "d_points")]
    pub points: usize,
    /// Fixed CRIP sequence time for the PL contrast, s.
    #[serde(default = "d_tau_fixed")]
    pub tau_s: f64,
}

fn d_span() -> f64 {
    4.0e6
}
fn d_points() -> usize {
    801
}
fn d_tau_fixed() -> f64 {
    1.0e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RelaxSection {
    pub tau_max_s: f64,
    #[serde(default = "d_points")]
    pub points: usize,
    #[serde(default = "d_baseline")]
    pub baseline: f64,
    #[serde(default = "d_amplitude")]
    pub amplitude: f64,
    /// Fractional multiplicative noise applied to the synthesized signal
    /// before refitting (seeded).
    #[serde(default)]
    pub noise: f64,
}

fn d_baseline() -> f64 {
    observables::PL_BASELINE
}
fn d_amplitude() -> f64 {
    observables::PL_AMPLITUDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OracleSection {
    pub r_min_nm: f64,
    pub r_max_nm: f64,
    #[serde(default = "d_seeds")]
    pub seeds: u64,
    pub times_s: Vec<f64>,
}

fn d_seeds() -> u64 {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScaleupSection {
    /// Agent names from the registry; empty means all.
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default = "d_t_max")]
    pub t_max_s: f64,
    #[serde(default = "d_curve_points")]
    pub curve_points: usize,
    #[serde(default = "d_p_targets")]
    pub p_targets: Vec<f64>,
    #[serde(default = "d_cells")]
    pub cells: u32,
    #[serde(default = "d_dilution")]
    pub dilution_factor: f64,
    #[serde(default = "d_area")]
    pub area_mm2: f64,
    #[serde(default = "d_height")]
    pub channel_height_um: f64,
    #[serde(default = "d_nv_density")]
    pub nv_density_per_cm2: f64,
    #[serde(default = "d_layers")]
    pub nv_layer_count: u32,
    #[serde(default = "d_cap")]
    pub per_nv_cap: f64,
}

fn d_t_max() -> f64 {
    120.0
}
fn d_curve_points() -> usize {
    120
}
fn d_p_targets() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}
fn d_cells() -> u32 {
    10
}
fn d_dilution() -> f64 {
    1000.0
}
fn d_area() -> f64 {
    scaleup::PolarizationCell::default().area_mm2
}
fn d_height() -> f64 {
    scaleup::PolarizationCell::default().channel_height_um
}
fn d_nv_density() -> f64 {
    scaleup::PolarizationCell::default().nv_density_per_cm2
}
fn d_layers() -> u32 {
    scaleup::PolarizationCell::default().nv_layer_count
}
fn d_cap() -> f64 {
    scaleup::PolarizationCell::default().per_nv_cap
}

impl ScaleupSection {
    pub fn to_cell(&self, probe: NvProbe) -> scaleup::PolarizationCell {
        scaleup::PolarizationCell {
            area_mm2: self.area_mm2,
            channel_height_um: self.channel_height_um,
            nv_density_per_cm2: self.nv_density_per_cm2,
            nv_layer_count: self.nv_layer_count,
            probe,
            per_nv_cap: self.per_nv_cap,
        }
    }

    pub fn agent_list(&self) -> Result<Vec<scaleup::ContrastAgent>, String> {
        let registry = scaleup::ContrastAgent::registry();
        if self.agents.is_empty() {
            return Ok(registry);
        }
        let mut out = Vec::new();
        for name in &self.agents {
            match registry.iter().find(|a| &a.name == name) {
                Some(a) => out.push(a.clone()),
                None => return Err(format!("scaleup.agents: unknown agent `{name}`")),
            }
        }
        Ok(out)
    }
}

/// Parse strict TOML into a config; syntax errors carry line/column from the
/// TOML parser.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Error> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let violations = validate(&config);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    Ok(config)
}

pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string_pretty(config).expect("config serializes")
}

/// All semantic violations, not just the first.
pub fn validate(config: &ExperimentConfig) -> Vec<String> {
    let mut errs = Vec::new();
    let mut require = |present: bool, name: &str| {
        if !present {
            errs.push(format!(
                "[{name}] section is required for kind = \"{}\"",
                config.kind.as_str()
            ));
        }
    };
    match config.kind {
        Kind::Spectrum => {
            require(config.ensemble.is_some(), "ensemble");
            require(config.grid.is_some(), "grid");
        }
        Kind::RelaxCurve => {
            require(config.ensemble.is_some(), "ensemble");
            require(config.grid.is_some(), "grid");
            require(config.relax.is_some(), "relax");
        }
        Kind::Evolve => {
            require(config.ensemble.is_some(), "ensemble");
            require(config.grid.is_some(), "grid");
            require(config.schedule.is_some(), "schedule");
        }
        Kind::SteadyState => {
            require(config.ensemble.is_some(), "ensemble");
            require(config.grid.is_some(), "grid");
        }
        Kind::OracleCompare => {
            require(config.ensemble.is_some(), "ensemble");
            require(config.oracle.is_some(), "oracle");
        }
        Kind::Scaleup => {
            require(config.scaleup.is_some(), "scaleup");
        }
    }

    if let Err(e) = config.probe.to_probe() {
        errs.push(e.to_string());
    }
    if config.coupling.cutoff_radius_nm <= 0.0 {
        errs.push("coupling.cutoff-radius-nm: must be > 0".into());
    }
    if let Some(ens) = &config.ensemble {
        if let Err(e) = ens.to_ensemble() {
            errs.push(e.to_string());
        }
    }
    if let Some(grid) = &config.grid {
        if let Err(e) = crip_pde::Grid::build(grid.clone()) {
            errs.push(e.to_string());
        }
    }
    if config.solver.dt < 0.0 {
        errs.push("solver.dt: must be >= 0".into());
    }
    if config.solver.dt_growth < 1.0 {
        errs.push("solver.dt-growth: must be >= 1".into());
    }
    if !(config.solver.steady_tolerance > 0.0 && config.solver.steady_tolerance < 1.0) {
        errs.push("solver.steady-tolerance: must be in (0, 1)".into());
    }
    if let Some(s) = &config.schedule {
        if s.times_s.is_empty() || s.times_s[0] <= 0.0 || s.times_s.windows(2).any(|w| w[1] <= w[0])
        {
            errs.push("schedule.times-s: must be strictly increasing and positive".into());
        }
        if !(0.0..=1.0).contains(&s.initial_polarization) {
            errs.push("schedule.initial-polarization: must be in [0, 1]".into());
        }
    }
    if let Some(s) = &config.spectrum {
        if !(s.span_hz > 0.0) {
            errs.push("spectrum.span-hz: must be > 0".into());
        }
        if s.points < 3 {
            errs.push("spectrum.points: must be >= 3".into());
        }
        if !(s.tau_s > 0.0) {
            errs.push("spectrum.tau-s: must be > 0".into());
        }
    }
    if let Some(r) = &config.relax {
        if !(r.tau_max_s > 0.0) {
            errs.push("relax.tau-max-s: must be > 0".into());
        }
        if r.points < 4 {
            errs.push("relax.points: must be >= 4".into());
        }
        if !(0.0..0.5).contains(&r.noise) {
            errs.push("relax.noise: must be in [0, 0.5)".into());
        }
    }
    if let Some(o) = &config.oracle {
        if !(o.r_min_nm > 0.0 && o.r_max_nm > o.r_min_nm) {
            errs.push("oracle.r-min-nm/r-max-nm: need 0 < r_min < r_max".into());
        }
        if o.seeds == 0 {
            errs.push("oracle.seeds: must be >= 1".into());
        }
        if o.times_s.is_empty()
            || o.times_s[0] <= 0.0
            || o.times_s.windows(2).any(|w| w[1] <= w[0])
        {
            errs.push("oracle.times-s: must be strictly increasing and positive".into());
        }
    }
    if let Some(s) = &config.scaleup {
        if let Ok(probe) = config.probe.to_probe() {
            // probe errors are already reported above
            if let Err(e) = s.to_cell(probe).validate() {
                errs.push(e.to_string());
            }
        }
        if let Err(e) = s.agent_list() {
            errs.push(e);
        }
        if s.t_max_s <= 0.0 {
            errs.push("scaleup.t-max-s: must be > 0".into());
        }
        if s.curve_points < 2 {
            errs.push("scaleup.curve-points: must be >= 2".into());
        }
        if s.p_targets.is_empty() || s.p_targets.iter().any(|&p| !(0.0 < p && p < 1.0)) {
            errs.push("scaleup.p-targets: must be non-empty with values in (0, 1)".into());
        }
        if let Err(e) = (scaleup::StackConfig {
            cells: s.cells,
            dilution_factor: s.dilution_factor,
        })
        .validate()
        {
            errs.push(e.to_string());
        }
    }
    errs
}
