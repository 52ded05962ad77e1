//! Closed forms against brute-force quadrature.

mod common;

use std::f64::consts::PI;

use common::*;
use darkstate_core::phonon::{amplitude_for_lambda, zeta_approx, zeta_exact_oracle};
use darkstate_core::special::{cgf, cross_function, si_ci};
use darkstate_core::units::inverse_temperature;
use darkstate_core::{OrientationFactors, PhononBath, PhotonSpectralFunction, Process, SpectralFamily, Variant};
use quadrature::double_exponential::integrate;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    integrate(f, a, b, 1e-13).integral
}

/// ∫_{a}^{∞} f(u)/(x − u) du for f = sin or cos, summed over half periods
/// and closed with two terms of the integration-by-parts tail.
fn oscillatory_tail(x: f64, a: f64, cosine: bool) -> f64 {
    let f = |u: f64| if cosine { u.cos() } else { u.sin() };
    let panels = 40_000;
    let mut sum = 0.0;
    let mut lo = a;
    for _ in 0..panels {
        let hi = lo + PI;
        sum += quad(|u| f(u) / (x - u), lo, hi);
        lo = hi;
    }
    let g = 1.0 / (x - lo);
    let dg = g * g;
    let (s, c) = lo.sin_cos();
    sum + if cosine { -s * g - c * dg } else { c * g - s * dg }
}

/// P∫₀^{2x} f(u)/(x − u) du folded about u = x.
fn folded(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    quad(|t| if t == 0.0 { 0.0 } else { (f(x - t) - f(x + t)) / t }, 0.0, x)
}

/// 𝒢(x) = P∫₀^∞ u³F(u)/(x³(x − u)) du / 2π with the divergent ∫u sin u and
/// ∫cos u pieces Abel-regularized to zero and ∫sin u to one.
fn cgf_oracle(x: f64, f: OrientationFactors) -> f64 {
    let tail_sin = oscillatory_tail(x, 2.0 * x, false);
    let tail_cos = oscillatory_tail(x, 2.0 * x, true);
    let i1 = folded(f64::sin, x) + tail_sin;
    let i2 = folded(|u| x * u.cos() - u.sin(), x) + x * tail_cos - tail_sin;
    1.5 / (2.0 * PI * x.powi(3)) * (f.alpha12 * (-x + x * x * i1) + f.beta12 * i2)
}

#[test]
fn cgf_matches_principal_value_integral() {
    let factors = [
        OrientationFactors::IDEAL,
        OrientationFactors {
            alpha12: 0.3,
            beta12: -0.7,
        },
    ];
    for f in factors {
        for x in [1e-3, 1e-2, 0.1, 0.5, 1.0] {
            let got = cgf(x, f, Variant::Rwa).unwrap();
            let want = cgf_oracle(x, f);
            assert!(rel(got, want) < 1e-4, "x {x}: {got} vs {want}");
        }
    }
}

#[test]
fn si_ci_match_quadrature() {
    for x in [0.01, 0.5, 1.0, 3.0, 10.0, 40.0] {
        let (si, ci) = si_ci(x).unwrap();
        let si_q = quad(|t| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x);
        let ci_q = EULER_GAMMA + x.ln() + quad(|t| if t == 0.0 { 0.0 } else { (t.cos() - 1.0) / t }, 0.0, x);
        assert!((si - si_q).abs() < 1e-10, "Si({x})");
        assert!((ci - ci_q).abs() < 1e-10, "Ci({x})");
    }
}

#[test]
fn cross_function_matches_angular_average() {
    // (3/2)⟨(d̂₁·d̂₂ − (d̂₁·k̂)(d̂₂·k̂)) e^{i x k̂·r̂}⟩ over the sphere for
    // dipoles along x̂ and along (cos θ, sin θ, 0), with r̂ = ẑ.
    for theta in [0.0, 0.3, 1.1] {
        let (st, ct) = f64::sin_cos(theta);
        let f = OrientationFactors {
            alpha12: ct,
            beta12: ct,
        };
        for x in [0.05, 0.7, 2.5] {
            let polar = |u: f64| {
                let (su, cu) = u.sin_cos();
                let azimuth = quad(
                    |p: f64| {
                        let (sp, cp) = p.sin_cos();
                        let k = [su * cp, su * sp, cu];
                        ct - k[0] * (ct * k[0] + st * k[1])
                    },
                    0.0,
                    2.0 * PI,
                );
                azimuth * (x * cu).cos() * su
            };
            let avg = quad(polar, 0.0, PI) / (4.0 * PI);
            assert!((cross_function(x, f) - 1.5 * avg).abs() < 1e-9, "theta {theta} x {x}");
        }
    }
}

fn j_gaussian(lambda: f64, cutoff: f64) -> impl Fn(f64) -> f64 {
    let a = 4.0 * lambda / (PI.sqrt() * cutoff.powi(3));
    move |w| a * w.powi(3) * (-(w / cutoff).powi(2)).exp()
}

#[test]
fn gaussian_amplitude_reproduces_reorganization_energy() {
    for lambda in [1e-4, 0.1, 0.3] {
        let a = amplitude_for_lambda(SpectralFamily::Gaussian, lambda, CUTOFF).unwrap();
        let j = |w: f64| a * w.powi(3) * (-(w / CUTOFF).powi(2)).exp();
        let got = quad(|w| if w == 0.0 { 0.0 } else { j(w) / w }, 0.0, 10.0 * CUTOFF);
        assert!(rel(got, lambda) < 1e-10);
    }
}

#[test]
fn kappa_matches_huang_rhys_quadrature() {
    let beta = inverse_temperature(T_PHONON);
    for lambda in [0.01, 0.1, 0.3] {
        let j = j_gaussian(lambda, CUTOFF);
        let phi0 = quad(
            |w| {
                if w == 0.0 {
                    0.0
                } else {
                    j(w) / (w * w) / (0.5 * beta * w).tanh()
                }
            },
            0.0,
            10.0 * CUTOFF,
        );
        let bath = gaussian_bath(lambda);
        assert!(rel(bath.kappa_sq(), (-phi0).exp()) < 1e-8, "lambda {lambda}");
    }
    // 1 − κ² at 100 meV, 300 K from the quadrature above.
    assert!((gaussian_bath(0.1).kappa_sq() - 0.674_35).abs() < 1e-5);
}

#[test]
fn zero_temperature_kappa_uses_plain_huang_rhys() {
    let j = j_gaussian(0.1, CUTOFF);
    let phi0 = quad(|w| if w == 0.0 { 0.0 } else { j(w) / (w * w) }, 0.0, 10.0 * CUTOFF);
    let bath = PhononBath::gaussian(0.1, CUTOFF, 0.0).unwrap();
    assert!(rel(bath.kappa_sq(), (-phi0).exp()) < 1e-8);
    assert!((bath.kappa_sq() - 0.686_52).abs() < 1e-5);
}

#[test]
fn zeta_estimates_stay_close_for_gaussian_bath() {
    let weight = PhotonSpectralFunction {
        dipole: 0.15,
        temperature: T_PHOTON,
        process: Process::Emission,
    };
    let bath = PhononBath::gaussian(0.1, CUTOFF, 0.0).unwrap();
    let approx = zeta_approx(&bath, &weight, 2.75).unwrap();
    let exact = zeta_exact_oracle(&bath, &weight, 2.75).unwrap();
    assert!((approx - 0.905_56).abs() < 1e-4, "{approx}");
    assert!((exact - 0.908_01).abs() < 1e-4, "{exact}");
    assert!(approx >= bath.kappa_sq() && approx <= 1.0);
}
