#![allow(dead_code)]

use std::f64::consts::PI;

use darkstate_core::geometry::separation_for_coupling;
use darkstate_core::{CouplingConvention, DimerParameters, DipoleGeometry, Monomer, PhononBath};

pub const SPLITTING1: f64 = 2.8;
pub const LIFETIME1_NS: f64 = 5.0;
pub const CUTOFF: f64 = 0.3;
pub const T_PHONON: f64 = 300.0;
pub const T_PHOTON: f64 = 6000.0;

/// Orientations (φ₁, φ₂, θ₁₂) of the three homodimer spectra rows.
pub const SPECTRA_GEOMETRIES: [(f64, f64, f64); 3] = [
    (0.5 * PI, 0.5 * PI, 0.0),
    (0.5 * PI, 0.5 * PI, 0.2 * PI),
    (0.6 * PI, 0.3 * PI, 0.2 * PI),
];

pub fn gaussian_bath(lambda: f64) -> PhononBath {
    PhononBath::gaussian(lambda, CUTOFF, T_PHONON).unwrap()
}

/// Dimer with d₂ = z d₁, δ₂′ = δ₁′ − Δ, and the separation chosen so that
/// the ideal-orientation C′ equals `cprime_over_z`·z.
pub fn dimer(lambda: f64, z: f64, delta: f64, cprime_over_z: f64, angles: (f64, f64, f64)) -> DimerParameters {
    let bath = gaussian_bath(lambda);
    let m1 = Monomer::from_lifetime(SPLITTING1, LIFETIME1_NS, bath.clone()).unwrap();
    let d1 = m1.dipole;
    let m2 = Monomer::new(SPLITTING1 - delta, z * d1, bath.clone()).unwrap();
    let r = separation_for_coupling(
        cprime_over_z,
        1.0,
        d1,
        d1,
        bath.kappa_sq(),
        CouplingConvention::Calibrated,
    )
    .unwrap();
    let g = DipoleGeometry::new(angles.0, angles.1, angles.2, r).unwrap();
    DimerParameters::new([m1, m2], g, T_PHOTON).unwrap()
}

pub fn ideal_dimer(lambda: f64, z: f64, delta: f64, cprime_over_z: f64) -> DimerParameters {
    dimer(lambda, z, delta, cprime_over_z, SPECTRA_GEOMETRIES[0])
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
