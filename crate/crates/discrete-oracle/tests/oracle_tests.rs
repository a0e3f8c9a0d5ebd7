use std::sync::Arc;

use approx::assert_relative_eq;
use crip_pde::{evolve, init_field, Grid, GridSpec, CripSystem, SolverConfig, Spacing};
use discrete_oracle::{
    discrete_hyperfine_variance, dump_csv, evolve_discrete, flip_flop_constant, load_csv,
    sample_ensemble, DiscreteEnsemble, SampleRegion,
};
use spinlab_core::{
    angular_averaged_cooling, cooling_coefficient, AngularKernel, CouplingModel, Geometry,
    NvProbe, SpinSpecies, TargetEnsemble,
};

fn h1_full_space(density: f64) -> TargetEnsemble {
    TargetEnsemble {
        species: SpinSpecies::hydrogen_1(),
        number_density_per_nm3: density,
        diffusion_nm2_per_s: 0.0,
        spin_lattice_rate: 1.0,
        geometry: Geometry::FullSpace,
    }
}

fn h1_model() -> CouplingModel {
    CouplingModel::dipolar(
        &NvProbe::default(),
        &SpinSpecies::hydrogen_1(),
        AngularKernel::Isotropic,
    )
    .unwrap()
}

#[test]
fn sampled_count_matches_density() {
    let probe = NvProbe::default();
    let ensemble = h1_full_space(1.94);
    let region = SampleRegion::Box {
        lower_nm: [-5.0, -5.0, -5.0],
        upper_nm: [5.0, 5.0, 5.0],
    };
    // mean over seeds should be within 3 sigma of the expected Poisson mean
    let n_seeds = 32;
    let lambda = 1.94 * 1000.0;
    let mut total = 0usize;
    for seed in 0..n_seeds {
        let d = sample_ensemble(&ensemble, &probe, &region, 0.0, seed).unwrap();
        total += d.len();
        assert!(d.polarizations.iter().all(|&p| p == 0.0));
    }
    let mean = total as f64 / n_seeds as f64;
    let sigma = (lambda / n_seeds as f64).sqrt();
    assert!(
        (mean - lambda).abs() < 3.0 * sigma,
        "mean count {mean} vs expected {lambda} +- {sigma}"
    );
}

#[test]
fn sampling_respects_geometry_and_exclusion() {
    let probe = NvProbe { depth_nm: 10.0, ..NvProbe::default() };
    let ensemble = TargetEnsemble {
        geometry: Geometry::HalfSpaceAboveSurface,
        ..h1_full_space(2.0)
    };
    let region = SampleRegion::Box {
        lower_nm: [-8.0, -8.0, 4.0],
        upper_nm: [8.0, 8.0, 20.0],
    };
    let d = sample_ensemble(&ensemble, &probe, &region, 11.0, 7).unwrap();
    assert!(!d.is_empty());
    for p in &d.positions {
        assert!(p[2] > probe.depth_nm, "spin below the surface at z = {}", p[2]);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        assert!(r >= 11.0, "spin inside exclusion radius at r = {r}");
    }
}

#[test]
fn same_seed_reproduces_bit_exactly() {
    let probe = NvProbe::default();
    let ensemble = h1_full_space(0.5);
    let region = SampleRegion::Shell { r_min_nm: 3.0, r_max_nm: 9.0 };
    let a = sample_ensemble(&ensemble, &probe, &region, 1.0, 42).unwrap();
    let b = sample_ensemble(&ensemble, &probe, &region, 1.0, 42).unwrap();
    let c = sample_ensemble(&ensemble, &probe, &region, 1.0, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.positions, c.positions);
}

#[test]
fn shell_sampling_stays_in_shell() {
    let probe = NvProbe::default();
    let ensemble = h1_full_space(1.0);
    let region = SampleRegion::Shell { r_min_nm: 2.0, r_max_nm: 6.0 };
    let d = sample_ensemble(&ensemble, &probe, &region, 0.0, 11).unwrap();
    for p in &d.positions {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        assert!((2.0..=6.0).contains(&r));
    }
}

#[test]
fn single_spin_matches_closed_form() {
    let probe = NvProbe::default();
    let model = h1_model();
    let pos = [4.0, -1.0, 2.0];
    let mut d = DiscreteEnsemble {
        positions: vec![pos],
        polarizations: vec![0.2],
        seed: 0,
    };
    let gamma_sl = 0.7;
    let t = 0.03;
    evolve_discrete(&mut d, &probe, &model, gamma_sl, None, t).unwrap();
    let u = cooling_coefficient(&model, &probe, pos);
    let total = u + gamma_sl;
    let expected = u / total + (0.2 - u / total) * (-total * t).exp();
    assert_relative_eq!(d.polarizations[0], expected, max_relative = 1e-6);
}

#[test]
fn two_spin_flip_flop_conserves_and_equilibrates() {
    let probe = NvProbe::default();
    // zero coupling to the probe: pure spin-spin exchange
    let model = CouplingModel::new(0.0, AngularKernel::Isotropic, 0.154).unwrap();
    let mut d = DiscreteEnsemble {
        positions: vec![[0.0, 0.0, 5.0], [0.0, 0.0, 7.0]],
        polarizations: vec![0.9, 0.1],
        seed: 0,
    };
    let w0 = flip_flop_constant(&SpinSpecies::hydrogen_1(), 1.0e4).unwrap();
    let w = w0 / 2.0f64.powi(6);
    // evolve several exchange times
    let t = 3.0 / w;
    evolve_discrete(&mut d, &probe, &model, 0.0, Some(w0), t).unwrap();
    assert!((d.total_polarization() - 1.0).abs() < 1e-9);
    // both spins relax toward the common mean 0.5
    assert!((d.polarizations[0] - 0.5).abs() < 0.01);
    assert!((d.polarizations[1] - 0.5).abs() < 0.01);
    assert!(d.polarizations[0] > d.polarizations[1]);
}

#[test]
fn variance_estimator_is_order_independent() {
    let probe = NvProbe::default();
    let ensemble = h1_full_space(1.94);
    let model = h1_model();
    let region = SampleRegion::Shell { r_min_nm: 3.0, r_max_nm: 6.0 };
    let d = sample_ensemble(&ensemble, &probe, &region, 3.0, 5).unwrap();
    let v = discrete_hyperfine_variance(&d, &model, &probe);
    let mut rev = d.clone();
    rev.positions.reverse();
    rev.polarizations.reverse();
    let v_rev = discrete_hyperfine_variance(&rev, &model, &probe);
    assert_relative_eq!(v, v_rev, max_relative = 1e-12);
}

#[test]
fn monte_carlo_variance_is_unbiased() {
    // E[(1/2) sum A^2] = (n/2) Int A^2 dV
    //                  = (n/2) C^2 <f^2> 4 pi (r_min^-3 - r_max^-3)/3
    let probe = NvProbe::default();
    let ensemble = h1_full_space(1.94);
    let model = h1_model();
    let (r_min, r_max) = (3.0, 4.459);
    let region = SampleRegion::Shell { r_min_nm: r_min, r_max_nm: r_max };
    let n_seeds = 200;
    let mut sum = 0.0;
    for seed in 0..n_seeds {
        let d = sample_ensemble(&ensemble, &probe, &region, r_min, seed).unwrap();
        sum += discrete_hyperfine_variance(&d, &model, &probe);
    }
    let mc = sum / n_seeds as f64;
    let c2 = model.prefactor * model.prefactor * model.kernel.mean_square();
    let analytic = 0.5
        * ensemble.number_density_per_nm3
        * c2
        * 4.0
        * std::f64::consts::PI
        * (r_min.powi(-3) - r_max.powi(-3))
        / 3.0;
    assert_relative_eq!(mc, analytic, max_relative = 0.02);
}

#[test]
fn csv_round_trip() {
    let probe = NvProbe::default();
    let ensemble = h1_full_space(1.0);
    let region = SampleRegion::Shell { r_min_nm: 3.0, r_max_nm: 5.0 };
    let mut d = sample_ensemble(&ensemble, &probe, &region, 3.0, 99).unwrap();
    let model = h1_model();
    evolve_discrete(&mut d, &probe, &model, 1.0, None, 0.01).unwrap();

    let mut buf = Vec::new();
    dump_csv(&d, &mut buf).unwrap();
    let loaded = load_csv(buf.as_slice()).unwrap();
    assert_eq!(loaded.seed, 99);
    assert_eq!(loaded.len(), d.len());
    for i in 0..d.len() {
        for k in 0..3 {
            assert_relative_eq!(loaded.positions[i][k], d.positions[i][k], max_relative = 1e-11);
        }
        assert_relative_eq!(
            loaded.polarizations[i],
            d.polarizations[i],
            max_relative = 1e-11,
            epsilon = 1e-13
        );
    }

    assert!(load_csv(&b"x_nm,y_nm,z_nm,p\n"[..]).is_err());
}

/// Seed-averaged discrete dynamics should track the continuum solver: the
/// hyperfine variance A_P^2(t) over a thin shell agrees within a few percent
/// at logarithmically spaced times.
#[test]
fn discrete_matches_continuum_variance() {
    let probe = NvProbe::default();
    let model = h1_model();
    let (r_min, r_max) = (3.0, 4.459);
    let ensemble = h1_full_space(1.94);
    let times: Vec<f64> = (0..5).map(|k| 1.0e-3 * 10f64.powf(k as f64 * 0.75)).collect();

    // continuum reference, diffusion off so the shell is closed
    let grid = Arc::new(
        Grid::build(GridSpec::Radial1D {
            r_min_nm: r_min,
            r_max_nm: r_max,
            n_cells: 128,
            spacing: Spacing::Logarithmic,
        })
        .unwrap(),
    );
    let system = CripSystem::new(&grid, &ensemble, &probe, &model);
    let mut field = init_field(grid.clone(), 0.0).unwrap();
    let config = SolverConfig {
        dt: system.suggested_dt(&grid),
        dt_growth: 1.05,
        ..SolverConfig::default()
    };
    let mut pde = Vec::new();
    let centers = grid.radial_centers().unwrap().to_vec();
    let volumes = grid.volumes().to_vec();
    evolve(&mut field, &system, &config, *times.last().unwrap(), &times, |f| {
        let mut a2 = 0.0;
        for ((&p, &r), &v) in f.values.iter().zip(&centers).zip(&volumes) {
            // <A^2>(r) = 2 Gamma2 u(r)
            let u = angular_averaged_cooling(&model, &probe, r);
            a2 += 0.5 * ensemble.number_density_per_nm3 * (1.0 - p) * 2.0 * probe.dephasing_rate * u * v;
        }
        pde.push(a2);
    })
    .unwrap();
    assert_eq!(pde.len(), times.len());

    // discrete ensemble averaged over seeds
    let n_seeds = 20;
    let region = SampleRegion::Shell { r_min_nm: r_min, r_max_nm: r_max };
    let mut discrete = vec![0.0; times.len()];
    let mut total_spins = 0usize;
    for seed in 0..n_seeds {
        let mut d = sample_ensemble(&ensemble, &probe, &region, r_min, seed).unwrap();
        total_spins += d.len();
        let mut t_prev = 0.0;
        for (k, &t) in times.iter().enumerate() {
            evolve_discrete(&mut d, &probe, &model, ensemble.spin_lattice_rate, None, t - t_prev)
                .unwrap();
            t_prev = t;
            discrete[k] += discrete_hyperfine_variance(&d, &model, &probe) / n_seeds as f64;
        }
    }
    // the shell holds ~500 spins per realization
    let mean_spins = total_spins as f64 / n_seeds as f64;
    assert!((mean_spins - 500.0).abs() < 50.0, "mean spin count {mean_spins}");

    for (k, &t) in times.iter().enumerate() {
        let rel = (discrete[k] - pde[k]).abs() / pde[k];
        assert!(
            rel < 0.10,
            "t = {t:.3e}: discrete {:.4e} vs pde {:.4e} ({:.1}%)",
            discrete[k],
            pde[k],
            100.0 * rel
        );
    }
}
