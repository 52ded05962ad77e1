mod common;

use common::*;
use darkstate_core::liouvillian::{
    build_photon_liouvillian, build_total_liouvillian, compose_with_trap, steady_state, time_evolve, Basis,
};
use darkstate_core::power::nonsecular_frequency;
use darkstate_core::{DensityVector, Error, RateSet, TrapParameters, Variant, VoltageConvention};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn fastest_oscillation(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .eigenvalues()
        .unwrap()
        .iter()
        .map(|e| e.im.abs())
        .fold(0.0, f64::max)
}

#[test]
fn nonsecular_frequency_is_the_generator_oscillation() {
    for (z, delta, c) in [(0.5, 0.05, 0.01), (0.5, 0.02, 0.01), (0.3, 0.2, 0.1), (0.9, 0.01, 0.01)] {
        let r = RateSet::compute(&ideal_dimer(1e-4, z, delta, c), Variant::Rwa).unwrap();
        let l = build_photon_liouvillian(&r, Variant::Rwa);
        let want = fastest_oscillation(&l.matrix);
        assert!(rel(nonsecular_frequency(&r), want) < 1e-6, "z {z} delta {delta}");
        // With ν = 2S the extra factor of 4 overshoots.
        let nu = 0.5 * (r.nu[0] + r.nu[1]);
        assert!(rel(r.renormalized_detuning().hypot(2.0 * nu), want) > 1e-2);
    }
}

#[test]
fn homodimer_has_no_population_coherence_oscillation() {
    let r = RateSet::compute(&ideal_dimer(0.1, 1.0, 0.0, 0.1), Variant::Rwa).unwrap();
    assert!(r.nu[0].abs() < 1e-15 && r.nu[1].abs() < 1e-15);
    assert!(rel(nonsecular_frequency(&r), r.renormalized_detuning().abs()) < 1e-12);
}

#[test]
fn evolution_relaxes_to_the_solved_steady_state() {
    let p = ideal_dimer(0.1, 0.735, 0.0, 0.1);
    let r = RateSet::compute(&p, Variant::Rwa).unwrap();
    let l = build_total_liouvillian(&r, Variant::Rwa);
    let ss = steady_state(&l).unwrap();
    let residual = (&l.matrix * DVector::from_vec(ss.components.clone())).norm();
    assert!(residual < 1e-18);
    let traj = time_evolve(&l, &DensityVector::ground(Basis::Dimer), &[1e9, 2e9, 3e9]).unwrap();
    let last = traj.last().unwrap();
    assert!((last.trace() - 1.0).norm() < 1e-6);
    for (a, b) in last.components.iter().zip(&ss.components) {
        assert!((a - b).norm() < 1e-5);
    }
}

#[test]
fn equal_steps_reuse_the_propagator() {
    let r = RateSet::compute(&ideal_dimer(0.1, 0.735, 0.0, 0.1), Variant::Rwa).unwrap();
    let l = build_total_liouvillian(&r, Variant::Rwa);
    let rho = DensityVector::ground(Basis::Dimer);
    let stepped = time_evolve(&l, &rho, &[1e6, 2e6, 3e6]).unwrap();
    let direct = time_evolve(&l, &rho, &[3e6]).unwrap();
    for (a, b) in stepped[2].components.iter().zip(&direct[0].components) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn trap_composite_is_trace_preserving_and_solvable() {
    let r = RateSet::compute(&ideal_dimer(0.1, 0.735, 0.0, 0.1), Variant::Rwa).unwrap();
    let l = build_total_liouvillian(&r, Variant::Rwa);
    let trap = TrapParameters {
        delta_t: r.dressed_minus_energy(),
        gamma_x: 1e-7,
        gamma_t: 1e-8,
        temperature: 300.0,
        voltage: VoltageConvention::Thermodynamic,
    };
    let c = compose_with_trap(&l, &trap).unwrap();
    assert_eq!(c.basis, Basis::DimerTrap);
    assert!(c.trace_defect() < 1e-12);
    let ss = steady_state(&c).unwrap();
    let (pa, pb) = ss.trap_populations().unwrap();
    assert!((pa + pb - 1.0).abs() < 1e-12);
    assert!(pa > 0.0 && pa < pb);
}

#[test]
fn isolated_heterodimer_with_large_lamb_coupling_is_rejected() {
    // Weak phonons, Δ ≫ C′: the near-field S₊₋ term breaks positivity.
    let p = ideal_dimer(1e-4, 0.743, 2.065, 0.1);
    let r = RateSet::compute(&p, Variant::Rwa).unwrap();
    match steady_state(&build_total_liouvillian(&r, Variant::Rwa)) {
        Err(Error::NegativePopulation { .. }) | Err(Error::DegenerateSteadyState { .. }) => {}
        other => panic!("expected a rejected steady state, got {other:?}"),
    }
}
