//! Experiment dispatch: build the domain objects from a config, run the
//! requested pipeline and write deterministic artifacts.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crip_pde::{evolve, init_field, steady_state, CripSystem, Grid, PolarizationField};
use discrete_oracle::{
    discrete_hyperfine_variance, evolve_discrete, sample_ensemble, SampleRegion,
};
use observables::{
    cross_relaxation_rate, fit_rate, hyperfine_variance, mean_region_threshold,
    polarized_spin_count, relaxation_curve, spectrum, total_rate, Region,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use spinlab_core::{larmor_frequency, resonance_field};

use crate::config::{ExperimentConfig, Kind};
use crate::error::Error;
use crate::output::{write_csv, write_json, write_manifest};

pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub summary: serde_json::Value,
    pub outputs: Vec<String>,
}

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, Error> {
    let violations = crate::config::validate(config);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    std::fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let (summary, mut outputs) = match config.kind {
        Kind::Spectrum => run_spectrum(config, out_dir)?,
        Kind::RelaxCurve => run_relax_curve(config, out_dir)?,
        Kind::Evolve => run_evolve(config, out_dir)?,
        Kind::SteadyState => run_steady_state(config, out_dir)?,
        Kind::OracleCompare => run_oracle_compare(config, out_dir)?,
        Kind::Scaleup => run_scaleup(config, out_dir)?,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    outputs.push("summary.json".into());
    outputs.push("manifest.json".into());
    write_manifest(out_dir, config, &outputs, start.elapsed().as_secs_f64())?;
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        summary,
        outputs,
    })
}

struct FieldSetup {
    grid: Arc<Grid>,
    probe: spinlab_core::NvProbe,
    ensemble: spinlab_core::TargetEnsemble,
    model: spinlab_core::CouplingModel,
}

fn field_setup(config: &ExperimentConfig) -> Result<FieldSetup, Error> {
    let probe = config.probe.to_probe()?;
    let ensemble = config
        .ensemble
        .as_ref()
        .expect("validated")
        .to_ensemble()?;
    let model = config.coupling.to_model(&probe, &ensemble.species)?;
    let grid = Arc::new(Grid::build(config.grid.clone().expect("validated"))?);
    Ok(FieldSetup {
        grid,
        probe,
        ensemble,
        model,
    })
}

/// Field CSV: (r_nm, p) for radial grids, (x_nm, y_nm, z_nm, p) for 3D.
fn write_field_csv(path: &Path, field: &PolarizationField) -> Result<(), Error> {
    if let Some(radii) = field.grid.radial_centers() {
        let rows: Vec<Vec<f64>> = radii
            .iter()
            .zip(&field.values)
            .map(|(&r, &p)| vec![r, p])
            .collect();
        write_csv(path, &["r_nm", "p"], &rows)
    } else {
        let rows: Vec<Vec<f64>> = field
            .grid
            .centers()
            .iter()
            .zip(&field.values)
            .map(|(&c, &p)| vec![c[0], c[1], c[2], p])
            .collect();
        write_csv(path, &["x_nm", "y_nm", "z_nm", "p"], &rows)
    }
}

/// Outermost radius of the contiguous region around the probe where
/// P >= level (radial grids; linear interpolation between shell centers).
fn front_radius(field: &PolarizationField, level: f64) -> Option<f64> {
    let radii = field.grid.radial_centers()?;
    if field.values.is_empty() || field.values[0] < level {
        return None;
    }
    for k in 1..field.values.len() {
        if field.values[k] < level {
            let (p0, p1) = (field.values[k - 1], field.values[k]);
            let f = (p0 - level) / (p0 - p1);
            return Some(radii[k - 1] + f * (radii[k] - radii[k - 1]));
        }
    }
    Some(*radii.last().unwrap())
}

fn run_steady_state(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(serde_json::Value, Vec<String>), Error> {
    let s = field_setup(config)?;
    let system = CripSystem::new(&s.grid, &s.ensemble, &s.probe, &s.model);
    let solver = config.solver.to_solver_config(system.suggested_dt(&s.grid));
    let steady = steady_state(s.grid.clone(), &system, &solver)?;
    let unpolarized = init_field(s.grid.clone(), 0.0)?;

    let a2_unpol = hyperfine_variance(&unpolarized, &s.ensemble, &s.model, &s.probe);
    let a2_pol = hyperfine_variance(&steady, &s.ensemble, &s.model, &s.probe);
    let gamma2 = s.probe.dephasing_rate;
    let gcr_unpol = cross_relaxation_rate(a2_unpol, gamma2, 0.0);
    let gcr_pol = cross_relaxation_rate(a2_pol, gamma2, 0.0);

    let threshold = mean_region_threshold(&steady, 0.5);
    let count = threshold
        .map(|t| polarized_spin_count(&steady, &s.ensemble, t))
        .transpose()?;
    let b_star = resonance_field(&s.probe, &s.ensemble.species)?;
    let enhancement = threshold
        .map(|t| {
            observables::enhancement_factor(
                &steady,
                &s.ensemble,
                Region::AboveThreshold(t),
                b_star,
                300.0,
            )
        })
        .transpose()?;

    write_field_csv(&out_dir.join("field.csv"), &steady)?;
    let summary = serde_json::json!({
        "a-p2-unpolarized-rad2-s2": a2_unpol,
        "a-p2-steady-rad2-s2": a2_pol,
        "gamma-cr-unpolarized-per-s": gcr_unpol,
        "gamma-cr-steady-per-s": gcr_pol,
        "ratio-unpol-over-steady": gcr_unpol / gcr_pol,
        "mean-polarization": steady.mean(),
        "half-mean-region-threshold": threshold,
        "half-mean-region-spin-count": count,
        "enhancement-at-300k": enhancement,
        "resonance-field-t": b_star,
    });
    Ok((summary, vec!["field.csv".into()]))
}

fn run_evolve(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(serde_json::Value, Vec<String>), Error> {
    let s = field_setup(config)?;
    let schedule = config.schedule.as_ref().expect("validated");
    let system = CripSystem::new(&s.grid, &s.ensemble, &s.probe, &s.model);
    let solver = config.solver.to_solver_config(system.suggested_dt(&s.grid));
    let mut field = init_field(s.grid.clone(), schedule.initial_polarization)?;

    let mut outputs = Vec::new();
    let mut snapshots = Vec::new();
    let mut io_error: Option<Error> = None;
    let t_end = *schedule.times_s.last().unwrap();
    evolve(&mut field, &system, &solver, t_end, &schedule.times_s, |f| {
        if io_error.is_some() {
            return;
        }
        let name = format!("profile_{:03}.csv", snapshots.len());
        if let Err(e) = write_field_csv(&out_dir.join(&name), f) {
            io_error = Some(e);
            return;
        }
        let count99 = polarized_spin_count(f, &s.ensemble, 0.99).unwrap_or(0.0);
        snapshots.push(serde_json::json!({
            "time-s": f.time,
            "file": name.clone(),
            "mean-polarization": f.mean(),
            "front-radius-99-nm": front_radius(f, 0.99),
            "spins-above-99": count99,
            "boundary-resolved": f.boundary_resolved(),
        }));
        outputs.push(name);
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    let summary = serde_json::json!({ "snapshots": snapshots });
    Ok((summary, outputs))
}

fn run_spectrum(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(serde_json::Value, Vec<String>), Error> {
    let s = field_setup(config)?;
    let spec = config.spectrum.clone().unwrap_or(crate::config::SpectrumSection {
        span_hz: 4.0e6,
        points: 801,
        tau_s: 1.0e-4,
    });
    let field = init_field(s.grid.clone(), 0.0)?;
    let b_star = resonance_field(&s.probe, &s.ensemble.species)?;
    let omega_n = larmor_frequency(&s.ensemble.species, b_star);
    let n = spec.points;
    let omegas: Vec<f64> = (0..n)
        .map(|k| omega_n - 0.5 * spec.span_hz + spec.span_hz * k as f64 / (n - 1) as f64)
        .collect();
    let sp = spectrum(&field, &s.ensemble, &s.model, &s.probe, &omegas, spec.tau_s)?;

    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| vec![sp.probe_frequencies_hz[k], sp.rates[k], sp.pl[k]])
        .collect();
    write_csv(
        &out_dir.join("spectrum.csv"),
        &["omega_hz", "gamma_tot_per_s", "pl_contrast"],
        &rows,
    )?;

    // numeric peak and FWHM of the cross-relaxation part
    let k_max = (0..n).max_by(|&i, &j| sp.rates[i].total_cmp(&sp.rates[j])).unwrap();
    let peak_cr = sp.rates[k_max] - s.probe.background_rate;
    let above: Vec<usize> = (0..n)
        .filter(|&k| sp.rates[k] - s.probe.background_rate >= 0.5 * peak_cr)
        .collect();
    let fwhm_hz = sp.probe_frequencies_hz[*above.last().unwrap()] - sp.probe_frequencies_hz[above[0]];
    let summary = serde_json::json!({
        "center-frequency-hz": sp.center_frequency_hz,
        "resonance-field-t": b_star,
        "peak-frequency-hz": sp.probe_frequencies_hz[k_max],
        "peak-rate-per-s": sp.rates[k_max],
        "fwhm-hz": fwhm_hz,
        "expected-fwhm-hz": 2.0 * s.probe.dephasing_rate / std::f64::consts::TAU,
    });
    Ok((summary, vec!["spectrum.csv".into()]))
}

fn run_relax_curve(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(serde_json::Value, Vec<String>), Error> {
    let s = field_setup(config)?;
    let relax = config.relax.as_ref().expect("validated");
    let field = init_field(s.grid.clone(), 0.0)?;
    let a2 = hyperfine_variance(&field, &s.ensemble, &s.model, &s.probe);
    let gamma_tot = total_rate(
        cross_relaxation_rate(a2, s.probe.dephasing_rate, 0.0),
        &s.probe,
    );
    let taus: Vec<f64> = (1..=relax.points)
        .map(|k| relax.tau_max_s * k as f64 / relax.points as f64)
        .collect();
    let curve = relaxation_curve(gamma_tot, &taus, relax.baseline, relax.amplitude)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let signal: Vec<f64> = curve
        .signal
        .iter()
        .map(|&y| {
            if relax.noise > 0.0 {
                y * (1.0 + relax.noise * rng.gen_range(-1.0..1.0))
            } else {
                y
            }
        })
        .collect();
    let rows: Vec<Vec<f64>> = taus.iter().zip(&signal).map(|(&t, &y)| vec![t, y]).collect();
    write_csv(&out_dir.join("curve.csv"), &["tau_s", "pl_contrast"], &rows)?;

    let samples: Vec<(f64, f64)> = taus.iter().copied().zip(signal.iter().copied()).collect();
    let fit = fit_rate(&samples)?;
    let summary = serde_json::json!({
        "a-p2-rad2-s2": a2,
        "gamma-tot-true-per-s": gamma_tot,
        "gamma-cr-true-per-s": gamma_tot - s.probe.background_rate,
        "fit-rate-per-s": fit.rate,
        "fit-baseline": fit.baseline,
        "fit-amplitude": fit.amplitude,
        "fit-residual-norm": fit.residual_norm,
    });
    Ok((summary, vec!["curve.csv".into()]))
}

fn run_oracle_compare(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(serde_json::Value, Vec<String>), Error> {
    let probe = config.probe.to_probe()?;
    let ensemble = config.ensemble.as_ref().expect("validated").to_ensemble()?;
    if ensemble.diffusion_nm2_per_s != 0.0 {
        return Err(Error::Invalid(vec![
            "ensemble.diffusion-nm2-per-s: oracle-compare requires a closed shell (diffusion = 0)"
                .into(),
        ]));
    }
    let model = config.coupling.to_model(&probe, &ensemble.species)?;
    let oracle = config.oracle.as_ref().expect("validated");
    let times = &oracle.times_s;

    // continuum reference on a matched radial grid, diffusion off
    let grid = Arc::new(Grid::build(crip_pde::GridSpec::Radial1D {
        r_min_nm: oracle.r_min_nm,
        r_max_nm: oracle.r_max_nm,
        n_cells: 128,
        spacing: crip_pde::Spacing::Logarithmic,
    })?);
    let system = CripSystem::new(&grid, &ensemble, &probe, &model);
    let mut solver = config.solver.to_solver_config(system.suggested_dt(&grid));
    if config.solver.dt_growth == 1.0 {
        solver.dt_growth = 1.05;
    }
    let mut field = init_field(grid.clone(), 0.0)?;
    let mut pde = Vec::new();
    evolve(&mut field, &system, &solver, *times.last().unwrap(), times, |f| {
        pde.push(hyperfine_variance(f, &ensemble, &model, &probe));
    })?;

    let region = SampleRegion::Shell {
        r_min_nm: oracle.r_min_nm,
        r_max_nm: oracle.r_max_nm,
    };
    let per_seed: Vec<(usize, Vec<f64>)> = (0..oracle.seeds)
        .into_par_iter()
        .map(|seed| {
            let mut d = sample_ensemble(&ensemble, &probe, &region, oracle.r_min_nm, seed)
                .expect("region validated");
            let n = d.len();
            let mut out = Vec::with_capacity(times.len());
            let mut t_prev = 0.0;
            for &t in times {
                evolve_discrete(
                    &mut d,
                    &probe,
                    &model,
                    ensemble.spin_lattice_rate,
                    None,
                    t - t_prev,
                )
                .expect("time grid validated");
                t_prev = t;
                out.push(discrete_hyperfine_variance(&d, &model, &probe));
            }
            (n, out)
        })
        .collect();

    let n_seeds = oracle.seeds as f64;
    let mean_spins = per_seed.iter().map(|(n, _)| *n as f64).sum::<f64>() / n_seeds;
    let discrete: Vec<f64> = (0..times.len())
        .map(|k| per_seed.iter().map(|(_, v)| v[k]).sum::<f64>() / n_seeds)
        .collect();

    let mut max_rel: f64 = 0.0;
    let rows: Vec<Vec<f64>> = (0..times.len())
        .map(|k| {
            let rel = (discrete[k] - pde[k]).abs() / pde[k];
            max_rel = max_rel.max(rel);
            vec![times[k], discrete[k], pde[k], rel]
        })
        .collect();
    write_csv(
        &out_dir.join("oracle.csv"),
        &[
            "t_s",
            "a_p2_discrete_rad2_s2",
            "a_p2_pde_rad2_s2",
            "rel_diff",
        ],
        &rows,
    )?;
    let summary = serde_json::json!({
        "seeds": oracle.seeds,
        "mean-spin-count": mean_spins,
        "max-rel-diff": max_rel,
    });
    Ok((summary, vec!["oracle.csv".into()]))
}

fn run_scaleup(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(serde_json::Value, Vec<String>), Error> {
    let probe = config.probe.to_probe()?;
    let section = config.scaleup.as_ref().expect("validated");
    let cell = section.to_cell(probe);
    let agents = section.agent_list().map_err(|e| Error::Invalid(vec![e]))?;
    let stack = scaleup::StackConfig {
        cells: section.cells,
        dilution_factor: section.dilution_factor,
    };

    let t_grid: Vec<f64> = (1..=section.curve_points)
        .map(|k| section.t_max_s * k as f64 / section.curve_points as f64)
        .collect();

    let mut outputs = Vec::new();
    let mut agent_summaries = Vec::new();
    for agent in &agents {
        let curve = scaleup::cell_polarization_curve(&cell, agent, &t_grid)?;
        let name = format!("curve_{}.csv", agent.name.to_lowercase().replace('-', "_"));
        let rows: Vec<Vec<f64>> = curve.iter().map(|&(t, p)| vec![t, p]).collect();
        write_csv(&out_dir.join(&name), &["t_s", "p_avg"], &rows)?;
        outputs.push(name.clone());
        let t80 = curve.iter().find(|&&(_, p)| p >= 0.8).map(|&(t, _)| t);
        agent_summaries.push(serde_json::json!({
            "agent": agent.name,
            "file": name,
            "final-polarization": curve.last().unwrap().1,
            "t80-s": t80,
        }));
    }

    // delivery sweep for the first (reference) agent
    let reference = &agents[0];
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &p in &section.p_targets {
        match scaleup::stack_delivery_rate(&stack, &cell, reference, p) {
            Ok(q) => rows.push(vec![p, q]),
            Err(scaleup::Error::UnreachableTarget { .. }) => skipped.push(p),
            Err(e) => return Err(e.into()),
        }
    }
    write_csv(
        &out_dir.join("delivery.csv"),
        &["p_target", "delivery_ul_per_s"],
        &rows,
    )?;
    outputs.push("delivery.csv".into());

    let summary = serde_json::json!({
        "agents": agent_summaries,
        "delivery-agent": reference.name,
        "cells": section.cells,
        "dilution-factor": section.dilution_factor,
        "unreachable-p-targets": skipped,
    });
    Ok((summary, outputs))
}
