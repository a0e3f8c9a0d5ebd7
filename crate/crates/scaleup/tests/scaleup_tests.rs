use approx::assert_relative_eq;
use scaleup::{
    agent_coupling, cell_polarization_curve, flow_rate_for_polarization, half_space_pump_integral,
    per_nv_pump_rate, stack_delivery_rate, ContrastAgent, Error, PolarizationCell, StackConfig,
};
use spinlab_core::{AngularKernel, CouplingModel, NvProbe, SpinSpecies};

fn t_grid(t_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

#[test]
fn registry_and_spin_densities() {
    let agents = ContrastAgent::registry();
    assert_eq!(agents.len(), 3);
    assert_eq!(agents[0].name, "HEP");
    // 1 M with 5 spins per molecule: 5 x 0.6022 spins/nm^3
    assert_relative_eq!(agents[0].spin_density_per_nm3(), 3.011, max_relative = 1e-3);
    assert_relative_eq!(
        ContrastAgent::water().spin_density_per_nm3(),
        2.0 * 0.6022,
        max_relative = 1e-3
    );
    assert!(ContrastAgent::new("x", SpinSpecies::hydrogen_1(), 0, 1.0, 0.0).is_err());
    assert!(ContrastAgent::new("x", SpinSpecies::hydrogen_1(), 1, 0.0, 0.0).is_err());
}

#[test]
fn half_space_integral_matches_closed_forms() {
    // (C^2/2G2) * (2 pi / d^3) * I_kernel with I_iso = 1/12, I_transverse = 1/32
    let probe = NvProbe { depth_nm: 5.0, ..NvProbe::default() };
    for (kernel, x_int) in [
        (AngularKernel::Isotropic, 1.0 / 12.0),
        (AngularKernel::Transverse, 1.0 / 32.0),
    ] {
        let model = CouplingModel::dipolar(&probe, &SpinSpecies::carbon_13(), kernel).unwrap();
        let got = half_space_pump_integral(&probe, &model);
        let expect = model.prefactor * model.prefactor / (2.0 * probe.dephasing_rate)
            * 2.0
            * std::f64::consts::PI
            / probe.depth_nm.powi(3)
            * x_int;
        assert_relative_eq!(got, expect, max_relative = 1e-6);
    }
}

#[test]
fn pump_rate_structure() {
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    let model = agent_coupling(&cell.probe, &agent).unwrap();

    assert_eq!(
        per_nv_pump_rate(&cell.probe, &model, &agent, 1.0, f64::INFINITY).unwrap(),
        0.0
    );
    // uncapped: linear in (1 - P) and in molarity
    let r0 = per_nv_pump_rate(&cell.probe, &model, &agent, 0.0, f64::INFINITY).unwrap();
    let r_half = per_nv_pump_rate(&cell.probe, &model, &agent, 0.5, f64::INFINITY).unwrap();
    assert_relative_eq!(r_half, 0.5 * r0, max_relative = 1e-12);
    let mut dilute = agent.clone();
    dilute.molarity_mol_per_l = 0.25;
    let r_dilute = per_nv_pump_rate(&cell.probe, &model, &dilute, 0.0, f64::INFINITY).unwrap();
    assert_relative_eq!(r_dilute, 0.25 * r0, max_relative = 1e-12);

    // 1 M HEP at 5 nm depth overwhelms a 2e4 /s cap: pump-limited regime
    assert!(r0 > 2.0e4);
    let capped = per_nv_pump_rate(&cell.probe, &model, &agent, 0.0, 2.0e4).unwrap();
    assert_eq!(capped, 2.0e4);
    // never exceeds the cap at any polarization
    for p in [0.0, 0.3, 0.9, 1.0] {
        assert!(per_nv_pump_rate(&cell.probe, &model, &agent, p, 2.0e4).unwrap() <= 2.0e4);
    }
}

#[test]
fn curve_is_zero_without_pumping() {
    let cell = PolarizationCell {
        per_nv_cap: 1e-300,
        ..PolarizationCell::default()
    };
    let mut agent = ContrastAgent::hep();
    agent.spin_lattice_rate = 0.0;
    let curve = cell_polarization_curve(&cell, &agent, &t_grid(10.0, 20)).unwrap();
    assert!(curve.iter().all(|&(_, p)| p < 1e-200));
}

#[test]
fn capped_linear_regime_matches_closed_form() {
    // Gamma_SL = 0, cap small enough that pumping stays saturated:
    // P(t) = min(kappa t, 1) with kappa = layers sigma cap / (n_s h)
    let cell = PolarizationCell {
        per_nv_cap: 1.0e3,
        ..PolarizationCell::default()
    };
    let mut agent = ContrastAgent::hep();
    agent.spin_lattice_rate = 0.0;
    let sigma_nm2 = cell.nv_density_per_cm2 * 1e-14;
    let kappa = cell.nv_layer_count as f64 * sigma_nm2 * cell.per_nv_cap
        / (agent.spin_density_per_nm3() * cell.channel_height_um * 1e3);
    // stay in the capped window: check up to the polarization where the
    // uncapped linear rate would still exceed the cap
    let model = agent_coupling(&cell.probe, &agent).unwrap();
    let uncapped0 = per_nv_pump_rate(&cell.probe, &model, &agent, 0.0, f64::INFINITY).unwrap();
    let p_exit_cap = 1.0 - cell.per_nv_cap / uncapped0;
    assert!(p_exit_cap > 0.9);

    let t_max = 0.8 * p_exit_cap / kappa;
    let curve = cell_polarization_curve(&cell, &agent, &t_grid(t_max, 16)).unwrap();
    for &(t, p) in &curve {
        let expect = (kappa * t).min(1.0);
        assert_relative_eq!(p, expect, max_relative = 0.01);
    }
}

#[test]
fn curve_is_monotone_and_bounded() {
    for agent in ContrastAgent::registry() {
        let cell = PolarizationCell::default();
        let curve = cell_polarization_curve(&cell, &agent, &t_grid(120.0, 60)).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        assert!(curve.iter().all(|&(_, p)| (0.0..=1.0).contains(&p)));
        // saturating: the last decade gains little
        let p_mid = curve[curve.len() / 2].1;
        let p_end = curve.last().unwrap().1;
        assert!(p_end - p_mid < 0.3 * p_end);
    }
}

#[test]
fn hep_reaches_80_percent_within_a_minute() {
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    let curve = cell_polarization_curve(&cell, &agent, &t_grid(60.0, 120)).unwrap();
    let t80 = curve.iter().find(|&&(_, p)| p >= 0.8).map(|&(t, _)| t);
    let t80 = t80.expect("HEP should pass 80% within 60 s");
    assert!((1.0..60.0).contains(&t80), "t80 = {t80} s");
}

#[test]
fn flow_rate_h_independent_in_capped_linear_regime() {
    // Q = 2 sigma cap area / (n_s P): doubling h doubles the volume and the
    // fill time equally
    let mut agent = ContrastAgent::hep();
    agent.spin_lattice_rate = 0.0;
    let mut q = Vec::new();
    for h in [1.0, 2.0] {
        let cell = PolarizationCell {
            per_nv_cap: 1.0e3,
            channel_height_um: h,
            ..PolarizationCell::default()
        };
        q.push(flow_rate_for_polarization(&cell, &agent, 0.5).unwrap());
    }
    assert_relative_eq!(q[0], q[1], max_relative = 0.01);
}

#[test]
fn flow_rate_decreasing_in_target() {
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    let mut last = f64::INFINITY;
    for p in [0.2, 0.4, 0.6, 0.8] {
        let q = flow_rate_for_polarization(&cell, &agent, p).unwrap();
        assert!(q < last, "Q not decreasing at P = {p}");
        last = q;
    }
}

#[test]
fn unreachable_target_reported() {
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    // saturation sits below 1 because of spin-lattice relaxation
    let err = flow_rate_for_polarization(&cell, &agent, 0.999);
    assert!(matches!(err, Err(Error::UnreachableTarget { .. })));
}

#[test]
fn stack_delivery_in_expected_band() {
    let stack = StackConfig { cells: 10, dilution_factor: 1000.0 };
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    let q = stack_delivery_rate(&stack, &cell, &agent, 0.8).unwrap();
    assert!(
        (10.0..100.0).contains(&q),
        "stack delivery {q} µL/s outside 10-100 µL/s"
    );
}

#[test]
fn stack_delivery_linear_in_cells_and_dilution() {
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    let base = stack_delivery_rate(
        &StackConfig { cells: 1, dilution_factor: 1.0 },
        &cell,
        &agent,
        0.5,
    )
    .unwrap();
    assert_relative_eq!(
        base,
        flow_rate_for_polarization(&cell, &agent, 0.5).unwrap(),
        max_relative = 1e-15
    );
    let doubled = stack_delivery_rate(
        &StackConfig { cells: 2, dilution_factor: 1.0 },
        &cell,
        &agent,
        0.5,
    )
    .unwrap();
    assert_relative_eq!(doubled, 2.0 * base, max_relative = 1e-15);
    let diluted = stack_delivery_rate(
        &StackConfig { cells: 1, dilution_factor: 250.0 },
        &cell,
        &agent,
        0.5,
    )
    .unwrap();
    assert_relative_eq!(diluted, 250.0 * base, max_relative = 1e-15);
}

#[test]
fn single_cell_concentrate_is_nanoliters_per_second() {
    let cell = PolarizationCell::default();
    let agent = ContrastAgent::hep();
    let q = flow_rate_for_polarization(&cell, &agent, 0.8).unwrap();
    // of order nL/s (1e-3 µL/s)
    assert!((1.0e-4..1.0e-2).contains(&q), "concentrate rate {q} µL/s");
}
