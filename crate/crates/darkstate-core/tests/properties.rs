mod common;

use common::*;
use darkstate_core::liouvillian::{build_phonon_liouvillian, build_photon_liouvillian, build_total_liouvillian};
use darkstate_core::special::cross_function;
use darkstate_core::spectra::f_pn_analytic;
use darkstate_core::units::inverse_temperature;
use darkstate_core::{OrientationFactors, RateSet, Variant};
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Rwa), Just(Variant::NonRwa)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_preserve_trace(
        lambda in 0.0..0.3f64,
        z in 0.05..1.0f64,
        delta in 0.0..0.6f64,
        c in 0.01..0.1f64,
        phi1 in 0.0..std::f64::consts::PI,
        phi2 in 0.0..std::f64::consts::PI,
        theta in 0.0..std::f64::consts::TAU,
        v in variant(),
    ) {
        let p = dimer(lambda, z, delta, c, (phi1, phi2, theta));
        let r = RateSet::compute(&p, v).unwrap();
        prop_assert!(build_photon_liouvillian(&r, v).trace_defect() < 1e-12);
        prop_assert!(build_phonon_liouvillian(&r).trace_defect() < 1e-12);
        prop_assert!(build_total_liouvillian(&r, v).trace_defect() < 1e-12);
    }

    #[test]
    fn photon_rates_are_nonnegative_and_bose_weighted(
        lambda in 0.0..0.3f64,
        z in 0.05..1.0f64,
        delta in 0.0..0.6f64,
        c in 0.01..0.1f64,
        theta in 0.0..std::f64::consts::TAU,
    ) {
        let p = dimer(lambda, z, delta, c, (0.5 * std::f64::consts::PI, 0.4, theta));
        let r = RateSet::compute(&p, Variant::Rwa).unwrap();
        for g in [r.big_gamma_plus_a, r.big_gamma_plus_e, r.big_gamma_minus_a, r.big_gamma_minus_e] {
            prop_assert!(g >= 0.0);
        }
        prop_assert!(rel(r.gamma_minus_a, r.n_minus * r.big_gamma_minus_a) < 1e-14);
        prop_assert!(rel(r.gamma_minus_e, (1.0 + r.n_minus) * r.big_gamma_minus_e) < 1e-14);
        prop_assert!(r.gamma_minus_a < r.gamma_minus_e);
    }

    #[test]
    fn phonon_transfer_obeys_detailed_balance(
        lambda in 0.02..0.3f64,
        z in 0.3..1.0f64,
        delta in 0.0..0.15f64,
        c in 0.03..0.1f64,
    ) {
        let p = ideal_dimer(lambda, z, delta, c);
        let r = RateSet::compute(&p, Variant::Rwa).unwrap();
        let ph = &r.phonon;
        prop_assert!(ph.gamma_plus_down > 0.0 && ph.gamma_plus_up > 0.0);
        let kms = (inverse_temperature(T_PHONON) * r.eigen.eta).exp();
        prop_assert!(rel(ph.gamma_plus_down / ph.gamma_plus_up, kms) < 1e-3);
    }

    #[test]
    fn analytic_sideband_fraction_is_a_fraction(k2 in 0.0..=1.0f64, nu in -0.99..1.0f64) {
        let f = f_pn_analytic(k2, nu).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn cross_function_is_bounded_by_its_origin_value(x in 0.0..50.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let f = OrientationFactors { alpha12: a, beta12: b };
        prop_assert!(cross_function(x, f).abs() <= 1.5 * (a.abs() + b.abs() / 3.0) + 1e-12);
    }
}
