use crate::constants::{BOLTZMANN, PLANCK};
use crate::species::SpinSpecies;
use crate::{Error, Result};

/// Equilibrium (Boltzmann) polarization tanh(h·|γ_n|·B / 2k_B·T) of a
/// spin-1/2 species at field B (tesla) and temperature T (kelvin).
pub fn thermal_polarization(species: &SpinSpecies, b_tesla: f64, temperature_k: f64) -> Result<f64> {
    if !(temperature_k > 0.0) {
        return Err(Error::invalid("temperature", "must be > 0"));
    }
    let nu = species.gamma_hz_per_t().abs() * b_tesla;
    Ok((PLANCK * nu / (2.0 * BOLTZMANN * temperature_k)).tanh())
}

/// The field whose thermal polarization equals P,
/// B = 2k_B·T·atanh(P) / h|γ_n| — the inverse of [`thermal_polarization`].
pub fn equivalent_field(p: f64, species: &SpinSpecies, temperature_k: f64) -> Result<f64> {
    if !(temperature_k > 0.0) {
        return Err(Error::invalid("temperature", "must be > 0"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid("polarization", format!("must be in [0, 1), got {p}")));
    }
    Ok(2.0 * BOLTZMANN * temperature_k * p.atanh() / (PLANCK * species.gamma_hz_per_t().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn room_temperature_values() {
        let p_h = thermal_polarization(&SpinSpecies::hydrogen_1(), 0.1026, 300.0).unwrap();
        assert!((p_h - 3.5e-7).abs() < 0.05 * 3.5e-7, "got {p_h}");
        let p_c = thermal_polarization(&SpinSpecies::carbon_13(), 0.1025, 300.0).unwrap();
        assert!((p_c - 8.8e-8).abs() < 0.05 * 8.8e-8, "got {p_c}");
    }

    #[test]
    fn zero_field_zero_polarization() {
        let p = thermal_polarization(&SpinSpecies::carbon_13(), 0.0, 300.0).unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(equivalent_field(0.0, &SpinSpecies::carbon_13(), 300.0).unwrap(), 0.0);
    }

    #[test]
    fn half_polarization_needs_enormous_field() {
        let b = equivalent_field(0.5, &SpinSpecies::hydrogen_1(), 300.0).unwrap();
        // consistent with the 10^5 T order of magnitude
        assert!((1.0e5..1.0e6).contains(&b), "got {b} T");
        assert!((b - 1.6e5).abs() < 0.1e5);
    }

    #[test]
    fn saturated_polarization_rejected() {
        assert!(equivalent_field(1.0, &SpinSpecies::hydrogen_1(), 300.0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(b in 1e-4..1e2f64, t in 1.0..1e3f64) {
            let s = SpinSpecies::hydrogen_1();
            let p = thermal_polarization(&s, b, t).unwrap();
            let b2 = equivalent_field(p, &s, t).unwrap();
            prop_assert!((b2 - b).abs() < 1e-9 * b);
        }

        #[test]
        fn monotone_in_field_and_temperature(b in 1e-4..1e2f64, t in 1.0..1e3f64) {
            let s = SpinSpecies::carbon_13();
            let p = thermal_polarization(&s, b, t).unwrap();
            prop_assert!(thermal_polarization(&s, b * 1.5, t).unwrap() > p);
            prop_assert!(thermal_polarization(&s, b, t * 1.5).unwrap() < p);
        }

        #[test]
        fn gamma_sign_symmetric(b in 1e-4..1e2f64) {
            let plus = SpinSpecies::new("x", 4.3163e6).unwrap();
            let minus = SpinSpecies::new("y", -4.3163e6).unwrap();
            let p1 = thermal_polarization(&plus, b, 300.0).unwrap();
            let p2 = thermal_polarization(&minus, b, 300.0).unwrap();
            prop_assert!((p1 - p2).abs() <= 1e-15 * p1.abs());
        }
    }
}
