use std::sync::Arc;

use serde::{Deserialize, Serialize};
use spinlab_core::{CouplingModel, NvProbe, TargetEnsemble};

use crate::cg;
use crate::cooling::cooling_field;
use crate::field::PolarizationField;
use crate::grid::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Second order: Crank-Nicolson half diffusion, exact reaction, half
    /// diffusion.
    StrangSplit,
    /// First order, unconditionally positivity-preserving: backward-Euler
    /// diffusion then exact reaction.
    ImplicitEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    ZeroFlux,
    FixedZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial time step, s.
    pub dt: f64,
    /// Geometric step growth per step (1.0 = fixed step).
    pub dt_growth: f64,
    /// Step-size ceiling, s.
    pub dt_max: f64,
    pub scheme: Scheme,
    /// Applied at the far/outer domain boundary; interior mask boundaries are
    /// always zero-flux.
    pub boundary: BoundaryKind,
    /// Relative residual for the steady-state solve.
    pub steady_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            dt_growth: 1.0,
            dt_max: f64::INFINITY,
            scheme: Scheme::StrangSplit,
            boundary: BoundaryKind::ZeroFlux,
            steady_tolerance: 1e-8,
            max_iterations: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::invalid("solver.dt", "must be > 0"));
        }
        if !(self.dt_growth >= 1.0) {
            return Err(Error::invalid("solver.dt_growth", "must be >= 1"));
        }
        if !(self.steady_tolerance > 0.0 && self.steady_tolerance < 1.0) {
            return Err(Error::invalid("solver.steady_tolerance", "must be in (0, 1)"));
        }
        Ok(())
    }
}

/// The bound right-hand side of the evolution equation: per-cell cooling
/// field, diffusion coefficient and spin-lattice rate.
#[derive(Debug, Clone)]
pub struct CripSystem {
    pub u: Vec<f64>,
    pub beta: f64,
    pub gamma_sl: f64,
}

impl CripSystem {
    pub fn new(
        grid: &Grid,
        ensemble: &TargetEnsemble,
        probe: &NvProbe,
        model: &CouplingModel,
    ) -> Self {
        CripSystem {
            u: cooling_field(grid, model, probe, ensemble),
            beta: ensemble.diffusion_nm2_per_s,
            gamma_sl: ensemble.spin_lattice_rate,
        }
    }

    pub fn from_parts(u: Vec<f64>, beta: f64, gamma_sl: f64) -> Self {
        CripSystem { u, beta, gamma_sl }
    }

    /// Scale the pumping by a pulse-sequence duty factor eta = tau/(tau + t_init).
    pub fn with_duty(mut self, eta: f64) -> Self {
        for u in &mut self.u {
            *u *= eta;
        }
        self
    }

    /// Default time step 0.1/max(u + Gamma_SL), capped by 10 h²/(6 beta).
    pub fn suggested_dt(&self, grid: &Grid) -> f64 {
        let max_rate = self
            .u
            .iter()
            .map(|&u| u + self.gamma_sl)
            .fold(0.0f64, f64::max);
        let reaction_dt = if max_rate > 0.0 { 0.1 / max_rate } else { 1.0 };
        if self.beta > 0.0 {
            let h2 = min_cell_scale_sq(grid);
            reaction_dt.min(10.0 * h2 / (6.0 * self.beta))
        } else {
            reaction_dt
        }
    }
}

fn min_cell_scale_sq(grid: &Grid) -> f64 {
    // volume^(2/3) of the smallest cell as a length-scale proxy
    grid.volumes()
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v))
        .powf(2.0 / 3.0)
}

/// Exact per-cell solution of dP/dt = u(1-P) - Gamma_SL*P over dt:
/// P <- P_inf + (P - P_inf) e^{-(u+Gamma_SL) dt} with P_inf = u/(u+Gamma_SL).
pub fn reaction_update(field: &mut PolarizationField, u: &[f64], gamma_sl: f64, dt: f64) {
    debug_assert_eq!(u.len(), field.values.len());
    for (p, &ui) in field.values.iter_mut().zip(u) {
        let total = ui + gamma_sl;
        if total > 0.0 {
            let p_inf = ui / total;
            *p = p_inf + (*p - p_inf) * (-total * dt).exp();
        }
    }
    field.assert_bounded();
}

/// One implicit diffusion step (backward Euler). Used directly by
/// `Scheme::ImplicitEuler`; `Scheme::StrangSplit` takes Crank-Nicolson half
/// steps through the same solver.
pub fn diffusion_update(
    field: &mut PolarizationField,
    beta: f64,
    dt: f64,
    config: &SolverConfig,
) -> Result<()> {
    diffusion_substep(field, beta, dt, 1.0, config)
}

/// Theta-method diffusion step: theta = 1 backward Euler, 0.5 Crank-Nicolson.
fn diffusion_substep(
    field: &mut PolarizationField,
    beta: f64,
    dt: f64,
    theta: f64,
    config: &SolverConfig,
) -> Result<()> {
    if beta == 0.0 || dt == 0.0 {
        return Ok(());
    }
    let grid = Arc::clone(&field.grid);
    let n = grid.n_cells();
    let volumes = grid.volumes();
    let fixed_zero = config.boundary == BoundaryKind::FixedZero;

    // negated Laplacian in conductance form: (Lneg x)_i = sum_f g (x_i - x_j)
    let apply_lneg = |x: &[f64], y: &mut [f64]| {
        y.fill(0.0);
        for f in grid.faces() {
            let d = f.conductance * (x[f.a as usize] - x[f.b as usize]);
            y[f.a as usize] += d;
            y[f.b as usize] -= d;
        }
        if fixed_zero {
            for &(c, g) in grid.outer_faces() {
                y[c as usize] += g * x[c as usize];
            }
        }
    };

    // rhs = V p - (1-theta) dt beta Lneg p
    let mut rhs = vec![0.0; n];
    if theta < 1.0 {
        apply_lneg(&field.values, &mut rhs);
    }
    for i in 0..n {
        rhs[i] = volumes[i] * field.values[i] - (1.0 - theta) * dt * beta * rhs[i];
    }

    // A = diag(V) + theta dt beta Lneg
    let coef = theta * dt * beta;
    let mut diag = volumes.to_vec();
    for f in grid.faces() {
        diag[f.a as usize] += coef * f.conductance;
        diag[f.b as usize] += coef * f.conductance;
    }
    if fixed_zero {
        for &(c, g) in grid.outer_faces() {
            diag[c as usize] += coef * g;
        }
    }

    let apply = |x: &[f64], y: &mut [f64]| {
        apply_lneg(x, y);
        for i in 0..n {
            y[i] = volumes[i] * x[i] + coef * y[i];
        }
    };

    // tight tolerance so zero-flux mass conservation holds to 1e-10 per step
    cg::solve(
        apply,
        &diag,
        &rhs,
        &mut field.values,
        1e-13,
        config.max_iterations,
    )?;

    for p in &mut field.values {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(())
}

/// Advance one step of length `dt` with the configured splitting.
pub fn step(
    field: &mut PolarizationField,
    system: &CripSystem,
    config: &SolverConfig,
    dt: f64,
) -> Result<()> {
    match config.scheme {
        Scheme::StrangSplit => {
            diffusion_substep(field, system.beta, 0.5 * dt, 0.5, config)?;
            reaction_update(field, &system.u, system.gamma_sl, dt);
            diffusion_substep(field, system.beta, 0.5 * dt, 0.5, config)?;
        }
        Scheme::ImplicitEuler => {
            diffusion_substep(field, system.beta, dt, 1.0, config)?;
            reaction_update(field, &system.u, system.gamma_sl, dt);
        }
    }
    field.time += dt;
    field.assert_bounded();
    Ok(())
}

/// Step repeatedly until `t_end`, invoking `on_snapshot` when the field
/// reaches each time in `snapshots` (which must be increasing and within
/// (field.time, t_end]). The step size follows the geometric schedule in
/// `config`, clipped to land exactly on snapshot times and `t_end`.
pub fn evolve(
    field: &mut PolarizationField,
    system: &CripSystem,
    config: &SolverConfig,
    t_end: f64,
    snapshots: &[f64],
    mut on_snapshot: impl FnMut(&PolarizationField),
) -> Result<()> {
    config.validate()?;
    if t_end < field.time {
        return Err(Error::invalid("t_end", "must be >= field.time"));
    }
    for w in snapshots.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("snapshots", "must be strictly increasing"));
        }
    }
    if let Some(&last) = snapshots.last() {
        if last > t_end {
            return Err(Error::invalid("snapshots", "must not exceed t_end"));
        }
    }

    let mut snap_iter = snapshots.iter().copied().peekable();
    while let Some(&t) = snap_iter.peek() {
        if t <= field.time {
            snap_iter.next();
        } else {
            break;
        }
    }

    let mut dt = config.dt;
    let eps = 1e-12 * t_end.max(1.0);
    while field.time < t_end - eps {
        let next_event = snap_iter.peek().copied().unwrap_or(t_end).min(t_end);
        let step_dt = dt.min(next_event - field.time);
        step(field, system, config, step_dt)?;
        if (field.time - next_event).abs() <= eps {
            field.time = next_event;
            if snap_iter.peek().is_some() {
                snap_iter.next();
                on_snapshot(field);
            }
        }
        dt = (dt * config.dt_growth).min(config.dt_max);
    }
    field.time = t_end;
    Ok(())
}

/// Solve the steady state of the evolution equation,
/// (beta Laplacian - u - Gamma_SL) P = -u, by preconditioned CG on the SPD
/// finite-volume system.
pub fn steady_state(
    grid: Arc<Grid>,
    system: &CripSystem,
    config: &SolverConfig,
) -> Result<PolarizationField> {
    config.validate()?;
    let n = grid.n_cells();
    let all_zero_u = system.u.iter().all(|&u| u == 0.0);
    if all_zero_u {
        return Ok(PolarizationField {
            grid,
            values: vec![0.0; n],
            time: f64::INFINITY,
        });
    }
    if system.gamma_sl == 0.0 && config.boundary == BoundaryKind::ZeroFlux {
        return Err(Error::DegenerateSteadyState);
    }

    if system.beta == 0.0 {
        // decoupled cells: P = u / (u + Gamma_SL)
        let values = system
            .u
            .iter()
            .map(|&u| {
                let total = u + system.gamma_sl;
                if total > 0.0 {
                    u / total
                } else {
                    0.0
                }
            })
            .collect();
        return Ok(PolarizationField {
            grid,
            values,
            time: f64::INFINITY,
        });
    }

    let volumes = grid.volumes();
    let fixed_zero = config.boundary == BoundaryKind::FixedZero;
    let beta = system.beta;

    let mut diag: Vec<f64> = (0..n)
        .map(|i| (system.u[i] + system.gamma_sl) * volumes[i])
        .collect();
    for f in grid.faces() {
        diag[f.a as usize] += beta * f.conductance;
        diag[f.b as usize] += beta * f.conductance;
    }
    if fixed_zero {
        for &(c, g) in grid.outer_faces() {
            diag[c as usize] += beta * g;
        }
    }

    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            y[i] = (system.u[i] + system.gamma_sl) * volumes[i] * x[i];
        }
        for f in grid.faces() {
            let d = beta * f.conductance * (x[f.a as usize] - x[f.b as usize]);
            y[f.a as usize] += d;
            y[f.b as usize] -= d;
        }
        if fixed_zero {
            for &(c, g) in grid.outer_faces() {
                y[c as usize] += beta * g * x[c as usize];
            }
        }
    };

    let b: Vec<f64> = (0..n).map(|i| system.u[i] * volumes[i]).collect();
    let mut x = vec![0.0; n];
    let stats = cg::solve(
        apply,
        &diag,
        &b,
        &mut x,
        config.steady_tolerance,
        config.max_iterations,
    )?;
    log::debug!(
        "steady-state CG converged in {} iterations (residual {:.3e})",
        stats.iterations,
        stats.residual
    );
    for p in &mut x {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(PolarizationField {
        grid,
        values: x,
        time: f64::INFINITY,
    })
}
