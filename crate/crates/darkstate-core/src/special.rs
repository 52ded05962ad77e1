//! Sine/cosine integrals, the cross function F(x) and the coherence
//! generating function 𝒢(x) built from them.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::OrientationFactors;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_SWITCH: f64 = 2.0;
const TAYLOR_SWITCH: f64 = 0.05;

/// Returns (Si(x), Ci(x)) for x > 0.
///
/// Power series below x = 2, continued fraction for E₁(ix) above.
pub fn si_ci(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("Ci requires finite x > 0, got {x}")));
    }
    if x < SERIES_SWITCH {
        Ok(si_ci_series(x))
    } else {
        si_ci_continued_fraction(x)
    }
}

/// Si(x) alone, defined for all real x.
pub fn si(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let s = si_ci(x.abs()).map(|(s, _)| s).unwrap_or(f64::NAN);
    s.copysign(x)
}

fn si_ci_series(x: f64) -> (f64, f64) {
    let mut si = 0.0;
    let mut ci = 0.0;
    let mut term = 1.0; // x^k / k!
    for k in 1..80usize {
        term *= x / k as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let contrib = sign * term / k as f64;
        if k % 2 == 1 {
            si += contrib;
        } else {
            ci += contrib;
        }
        if term < 1e-18 && k > 4 {
            break;
        }
    }
    (si, EULER_GAMMA + x.ln() + ci)
}

fn si_ci_continued_fraction(x: f64) -> Result<(f64, f64)> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..200 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < EPS {
            let h = Complex64::new(x.cos(), -x.sin()) * h;
            return Ok((FRAC_PI_2 + h.im, -h.re));
        }
    }
    Err(Error::SeriesNotConverged { terms: 200 })
}

/// cos x/x² − sin x/x³, with a Taylor branch near zero.
fn bracket_cos_sin(x: f64) -> f64 {
    if x.abs() < TAYLOR_SWITCH {
        let x2 = x * x;
        -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0
    } else {
        x.cos() / (x * x) - x.sin() / (x * x * x)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < TAYLOR_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}

/// Cross function F(x) = (3/2)[α sin x/x + β(cos x/x² − sin x/x³)].
///
/// F(0) = d̂₁·d̂₂.
pub fn cross_function(x: f64, f: OrientationFactors) -> f64 {
    let x = x.abs();
    1.5 * (f.alpha12 * sinc(x) + f.beta12 * bracket_cos_sin(x))
}

/// 𝒢′(x) = −(3/8)[α cos x/x − β(sin x/x² + cos x/x³)].
pub fn cgf_prime(x: f64, f: OrientationFactors) -> f64 {
    let (s, c) = x.sin_cos();
    -0.375 * (f.alpha12 * c / x - f.beta12 * (s / (x * x) + c / (x * x * x)))
}

/// The principal-value piece g(x) of the generating function.
pub fn cgf_g(x: f64, f: OrientationFactors) -> Result<f64> {
    let (si, ci) = si_ci(x)?;
    let (s, c) = x.sin_cos();
    let a = -1.0 / (x * x) + (s * ci - c * si) / x;
    let b = bracket_cos_sin(x) * ci + (s / (x * x) + c / (x * x * x)) * si;
    Ok(3.0 / (4.0 * PI) * (f.alpha12 * a + f.beta12 * b))
}

/// Which form of the generating function applies at negative frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Rotating-wave: counter-rotating (negative-frequency) terms vanish.
    #[default]
    Rwa,
    /// Keeps counter-rotating virtual terms.
    NonRwa,
}

/// 𝒢 at signed dimensionless frequency `omega_r` = ω r₁₂.
///
/// Positive frequency gives 𝒢′ + g. Negative frequency gives 0 under the
/// rotating-wave variant and 𝒢′(|x|) − g(|x|) otherwise.
pub fn cgf(omega_r: f64, f: OrientationFactors, variant: Variant) -> Result<f64> {
    if omega_r == 0.0 || !omega_r.is_finite() {
        return Err(Error::invalid(format!(
            "generating function needs a finite nonzero frequency, got {omega_r}"
        )));
    }
    let x = omega_r.abs();
    if omega_r > 0.0 {
        Ok(cgf_prime(x, f) + cgf_g(x, f)?)
    } else {
        match variant {
            Variant::Rwa => Ok(0.0),
            Variant::NonRwa => Ok(cgf_prime(x, f) - cgf_g(x, f)?),
        }
    }
}
