//! Phonon environment: spectral densities, propagators, the ζ
//! renormalization of photon rates and the polaron-frame correlation
//! functions that drive phonon-assisted transfer.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::quad::{simpson_weights, CompositeRule};
use crate::units::{bare_rate, bose, inverse_temperature};

/// Time step of the cached propagator grid (eV⁻¹).
pub const PROPAGATOR_DT: f64 = 0.05;
/// Longest propagator horizon (eV⁻¹) built by quadrature.
pub const QUADRATURE_HORIZON_CAP: f64 = 2000.0;
/// Longest horizon for closed-form propagators.
pub const CLOSED_FORM_HORIZON_CAP: f64 = 4000.0;
/// Relative size of |φ(t)| below which the propagator counts as decayed.
pub const DECAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralFamily {
    /// J(ω) = Aω³exp(−ω²/ω_c²)
    Gaussian,
    /// J(ω) = Aω³exp(−ω/Ω)
    Exponential,
}

impl SpectralFamily {
    /// Reorganization energy per unit amplitude, ∫J/ω dω at A = 1.
    pub fn lambda_per_amplitude(self, cutoff: f64) -> f64 {
        match self {
            SpectralFamily::Gaussian => PI.sqrt() * cutoff.powi(3) / 4.0,
            SpectralFamily::Exponential => 2.0 * cutoff.powi(3),
        }
    }

    /// J(ω)/ω² at unit amplitude.
    fn weight(self, omega: f64, cutoff: f64) -> f64 {
        match self {
            SpectralFamily::Gaussian => omega * (-(omega / cutoff).powi(2)).exp(),
            SpectralFamily::Exponential => omega * (-omega / cutoff).exp(),
        }
    }

    /// Upper frequency beyond which J is negligible in double precision.
    fn omega_max(self, cutoff: f64) -> f64 {
        match self {
            SpectralFamily::Gaussian => 7.0 * cutoff,
            SpectralFamily::Exponential => 50.0 * cutoff,
        }
    }

    /// φ(0) at zero temperature and unit amplitude.
    fn phi0_zero_temperature(self, cutoff: f64) -> f64 {
        match self {
            SpectralFamily::Gaussian => cutoff * cutoff / 2.0,
            SpectralFamily::Exponential => cutoff * cutoff,
        }
    }
}

/// Amplitude A giving reorganization energy `lambda`.
pub fn amplitude_for_lambda(family: SpectralFamily, lambda: f64, cutoff: f64) -> Result<f64> {
    ensure_non_negative("reorganization energy", lambda)?;
    ensure_positive("cutoff", cutoff)?;
    Ok(lambda / family.lambda_per_amplitude(cutoff))
}

/// Unit-amplitude propagator sampled on t_k = k·dt.
#[derive(Debug)]
pub struct PropagatorShape {
    pub dt: f64,
    pub values: Vec<Complex64>,
    pub phi0: f64,
    pub phi0_zero_temperature: f64,
    /// |φ̂(t_max)|/φ̂(0) at the end of the grid.
    pub residual: f64,
}

impl PropagatorShape {
    pub fn horizon(&self) -> f64 {
        (self.values.len().saturating_sub(1)) as f64 * self.dt
    }

    pub fn decayed(&self) -> bool {
        self.residual < DECAY_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ShapeKey {
    family: SpectralFamily,
    cutoff: u64,
    temperature: u64,
}

fn shape_cache() -> &'static Mutex<HashMap<ShapeKey, Arc<PropagatorShape>>> {
    static CACHE: OnceLock<Mutex<HashMap<ShapeKey, Arc<PropagatorShape>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// ω·coth(βω/2), finite at ω = 0.
fn omega_coth(omega: f64, beta: f64) -> f64 {
    if !beta.is_finite() {
        return omega;
    }
    let y = 0.5 * beta * omega;
    if y < 1e-4 {
        2.0 / beta * (1.0 + y * y / 3.0)
    } else {
        omega / y.tanh()
    }
}

fn frequency_rule(family: SpectralFamily, cutoff: f64, horizon: f64) -> CompositeRule {
    let wmax = family.omega_max(cutoff);
    let by_resolution = (wmax / (0.25 * cutoff)).ceil() as usize;
    let by_oscillation = (wmax * horizon / PI).ceil() as usize;
    CompositeRule::new(0.0, wmax, by_resolution.max(by_oscillation) + 2, 16)
}

/// Unit-amplitude φ̂(t) by direct quadrature.
fn shape_at(family: SpectralFamily, cutoff: f64, beta: f64, t: f64) -> Complex64 {
    let rule = frequency_rule(family, cutoff, t);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&w, &q) in rule.nodes.iter().zip(&rule.weights) {
        let j = family.weight(w, cutoff) / w.max(1e-300) * q;
        let (s, c) = (w * t).sin_cos();
        acc += Complex64::new(omega_coth(w, beta) * c, -w * s) * j;
    }
    acc
}

fn closed_form_exponential(cutoff: f64, t: f64) -> Complex64 {
    let d = Complex64::new(1.0, cutoff * t);
    Complex64::new(cutoff * cutoff, 0.0) / (d * d)
}

fn build_shape(family: SpectralFamily, cutoff: f64, temperature: f64) -> PropagatorShape {
    let beta = inverse_temperature(temperature);
    let dt = PROPAGATOR_DT;
    let phi0_zero_temperature = family.phi0_zero_temperature(cutoff);

    if family == SpectralFamily::Exponential && !beta.is_finite() {
        let n = (CLOSED_FORM_HORIZON_CAP / dt).round() as usize + 1;
        let values: Vec<Complex64> = (0..n).map(|k| closed_form_exponential(cutoff, k as f64 * dt)).collect();
        let residual = values[n - 1].norm() / phi0_zero_temperature;
        return PropagatorShape {
            dt,
            values,
            phi0: phi0_zero_temperature,
            phi0_zero_temperature,
            residual,
        };
    }

    let phi0 = shape_at(family, cutoff, beta, 0.0).re;
    // Grow the horizon until the propagator has decayed.
    let mut horizon = 8.0 / cutoff;
    let mut residual = shape_at(family, cutoff, beta, horizon).norm() / phi0;
    while residual >= DECAY_TOLERANCE && horizon < QUADRATURE_HORIZON_CAP {
        horizon = (horizon * 1.5).min(QUADRATURE_HORIZON_CAP);
        residual = shape_at(family, cutoff, beta, horizon).norm() / phi0;
    }
    let n = (horizon / dt).ceil() as usize + 1;

    // Phasor recurrence over a fixed node set, parallel over node chunks.
    let rule = frequency_rule(family, cutoff, horizon);
    let nodes: Vec<(f64, f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&w, &q)| {
            let j = family.weight(w, cutoff) / w * q;
            (w, j * omega_coth(w, beta), j * w)
        })
        .collect();
    let values = nodes
        .par_chunks(512)
        .map(|chunk| {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for &(w, a_cos, a_sin) in chunk {
                let step = Complex64::from_polar(1.0, w * dt);
                let mut ph = Complex64::new(1.0, 0.0);
                for (k, slot) in out.iter_mut().enumerate() {
                    if k % 256 == 0 {
                        ph = Complex64::from_polar(1.0, w * dt * k as f64);
                    }
                    *slot += Complex64::new(a_cos * ph.re, -a_sin * ph.im);
                    ph *= step;
                }
            }
            out
        })
        .reduce(
            || vec![Complex64::new(0.0, 0.0); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    PropagatorShape {
        dt,
        values,
        phi0,
        phi0_zero_temperature,
        residual,
    }
}

fn cached_shape(family: SpectralFamily, cutoff: f64, temperature: f64) -> Arc<PropagatorShape> {
    let key = ShapeKey {
        family,
        cutoff: cutoff.to_bits(),
        temperature: temperature.max(0.0).to_bits(),
    };
    if let Some(s) = shape_cache().lock().expect("shape cache").get(&key) {
        return Arc::clone(s);
    }
    let shape = Arc::new(build_shape(family, cutoff, temperature.max(0.0)));
    let mut cache = shape_cache().lock().expect("shape cache");
    Arc::clone(cache.entry(key).or_insert(shape))
}

/// A harmonic bath coupled to one monomer.
///
/// Built eagerly: the propagator grid is computed (or fetched from a
/// process-wide cache keyed on family, cutoff and temperature) at
/// construction.
#[derive(Debug, Clone)]
pub struct PhononBath {
    family: SpectralFamily,
    lambda: f64,
    cutoff: f64,
    temperature: f64,
    amplitude: f64,
    shape: Option<Arc<PropagatorShape>>,
}

impl PhononBath {
    pub fn new(family: SpectralFamily, lambda: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        ensure_non_negative("phonon temperature", temperature)?;
        let amplitude = amplitude_for_lambda(family, lambda, cutoff)?;
        let shape = (lambda > 0.0).then(|| cached_shape(family, cutoff, temperature));
        Ok(PhononBath {
            family,
            lambda,
            cutoff,
            temperature,
            amplitude,
            shape,
        })
    }

    pub fn gaussian(lambda: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        Self::new(SpectralFamily::Gaussian, lambda, cutoff, temperature)
    }

    /// Same family, cutoff and temperature with a new reorganization energy.
    pub fn with_reorganization(&self, lambda: f64) -> Result<Self> {
        let amplitude = amplitude_for_lambda(self.family, lambda, self.cutoff)?;
        let shape = if lambda > 0.0 {
            Some(
                self.shape
                    .clone()
                    .unwrap_or_else(|| cached_shape(self.family, self.cutoff, self.temperature)),
            )
        } else {
            None
        };
        Ok(PhononBath {
            lambda,
            amplitude,
            shape,
            ..*self
        })
    }

    pub fn family(&self) -> SpectralFamily {
        self.family
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.amplitude * omega * omega * self.family.weight(omega, self.cutoff)
    }

    /// φ(0) at the bath temperature.
    pub fn phi0(&self) -> f64 {
        self.shape.as_ref().map_or(0.0, |s| self.amplitude * s.phi0)
    }

    /// φ(0) at zero temperature, which is what ζ uses.
    pub fn phi0_zero_temperature(&self) -> f64 {
        self.amplitude * self.family.phi0_zero_temperature(self.cutoff)
    }

    pub fn kappa(&self) -> f64 {
        (-0.5 * self.phi0()).exp()
    }

    pub fn kappa_sq(&self) -> f64 {
        (-self.phi0()).exp()
    }

    /// φ(t) by direct quadrature.
    pub fn propagator(&self, t: f64) -> Result<Complex64> {
        ensure_non_negative("time", t)?;
        if self.amplitude == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let beta = inverse_temperature(self.temperature);
        if self.family == SpectralFamily::Exponential && !beta.is_finite() {
            return Ok(closed_form_exponential(self.cutoff, t) * self.amplitude);
        }
        Ok(shape_at(self.family, self.cutoff, beta, t) * self.amplitude)
    }

    /// Conjugate propagator φ̄(t) = φ(t)*.
    pub fn conjugate_propagator(&self, t: f64) -> Result<Complex64> {
        self.propagator(t).map(|p| p.conj())
    }

    pub fn grid_step(&self) -> f64 {
        PROPAGATOR_DT
    }

    /// Number of cached grid points (zero for an uncoupled bath).
    pub fn grid_len(&self) -> usize {
        self.shape.as_ref().map_or(0, |s| s.values.len())
    }

    /// Cached φ(k·dt); zero beyond the grid.
    pub fn propagator_at(&self, k: usize) -> Complex64 {
        match &self.shape {
            Some(s) if k < s.values.len() => s.values[k] * self.amplitude,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Absolute |φ| at the end of the cached grid.
    pub fn tail_residual(&self) -> f64 {
        self.shape
            .as_ref()
            .map_or(0.0, |s| s.residual * s.phi0 * self.amplitude)
    }

    pub fn horizon(&self) -> f64 {
        self.shape.as_ref().map_or(0.0, |s| s.horizon())
    }
}

/// Optical process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Process {
    #[serde(rename = "A")]
    Absorption,
    #[serde(rename = "E")]
    Emission,
}

impl Process {
    pub fn label(self) -> &'static str {
        match self {
            Process::Absorption => "A",
            Process::Emission => "E",
        }
    }
}

/// Photon-weighted spectral function F^±(ν) of one monomer.
///
/// Emission: γ(ν)[1 + N(ν)]/2π. Absorption: γ(ν)N(ν)/2π. Zero for ν ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonSpectralFunction {
    /// Dipole magnitude in e·nm.
    pub dipole: f64,
    /// Photon temperature in K.
    pub temperature: f64,
    pub process: Process,
}

impl PhotonSpectralFunction {
    pub fn value(&self, nu: f64) -> f64 {
        if nu <= 0.0 {
            return 0.0;
        }
        let occupation = match self.process {
            Process::Emission => 1.0 + bose(nu, self.temperature),
            Process::Absorption => bose(nu, self.temperature),
        };
        bare_rate(self.dipole, nu) * occupation / (2.0 * PI)
    }
}

/// Single-mode approximation to the rate renormalization ζ.
///
/// ζ = κ²[1 + Σₙ φ(0)ⁿ/n! · F(ω ∓ nω̃)/F(ω)] with κ, φ(0) and ω̃ = λ/φ(0)
/// taken at zero phonon temperature. Emission shifts down, absorption up.
pub fn zeta_approx(bath: &PhononBath, weight: &PhotonSpectralFunction, omega: f64) -> Result<f64> {
    ensure_positive("frequency", omega)?;
    let f0 = weight.value(omega);
    if !(f0 > 0.0) {
        return Err(Error::VanishingSpectralWeight { omega });
    }
    let phi0 = bath.phi0_zero_temperature();
    if phi0 == 0.0 {
        return Ok(1.0);
    }
    let omega_tilde = bath.lambda() / phi0;
    let mut sum = 1.0;
    let mut coef = 1.0;
    for n in 1..2000usize {
        coef *= phi0 / n as f64;
        let shifted = match weight.process {
            Process::Emission => omega - n as f64 * omega_tilde,
            Process::Absorption => omega + n as f64 * omega_tilde,
        };
        let term = coef * weight.value(shifted) / f0;
        sum += term;
        if n as f64 > phi0 && (term <= 1e-12 * sum || coef < 1e-16) {
            let z = (-phi0).exp() * sum;
            return Ok(if z > 1.0 && z - 1.0 < 1e-9 { 1.0 } else { z });
        }
    }
    Err(Error::SeriesNotConverged { terms: 2000 })
}

/// Brute-force ζ from the time-domain double integral.
///
/// K(ε) = Re∫₀^∞ e^{iεt}(e^{φ(t)} − 1)dt is built on the cached propagator
/// grid; the constant part of e^{φ} gives the bare rate through
/// ∫₀^∞e^{ixt}dt = πδ(x) + iP/x. Then
/// ζ = κ²[1 + ∫F(ω ∓ ε)K(ε)dε / (πF(ω))].
pub fn zeta_exact_oracle(bath: &PhononBath, weight: &PhotonSpectralFunction, omega: f64) -> Result<f64> {
    ensure_positive("frequency", omega)?;
    let f0 = weight.value(omega);
    if !(f0 > 0.0) {
        return Err(Error::VanishingSpectralWeight { omega });
    }
    if bath.lambda() == 0.0 {
        return Ok(1.0);
    }
    if bath.tail_residual() > 1e-5 {
        return Err(Error::PropagatorNotDecayed {
            horizon: bath.horizon(),
            residual: bath.tail_residual(),
        });
    }
    let n = bath.grid_len();
    let dt = bath.grid_step();
    let tw = simpson_weights(n, dt);
    let integrand: Vec<Complex64> = (0..n).map(|k| (bath.propagator_at(k).exp() - 1.0) * tw[k]).collect();

    let de = 2e-3;
    let e_lo = -0.5;
    let e_hi = match weight.process {
        Process::Emission => omega,
        Process::Absorption => omega.max(10.0 * bath.cutoff() + 20.0 * bath.lambda()),
    };
    let m = ((e_hi - e_lo) / de).ceil() as usize + 1;
    let kernel: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let eps = e_lo + i as f64 * de;
            let step = Complex64::from_polar(1.0, eps * dt);
            let mut ph = Complex64::new(1.0, 0.0);
            let mut acc = 0.0;
            for (k, v) in integrand.iter().enumerate() {
                if k % 256 == 0 {
                    ph = Complex64::from_polar(1.0, eps * dt * k as f64);
                }
                acc += (v * ph).re;
                ph *= step;
            }
            acc
        })
        .collect();
    let ew = simpson_weights(m, de);
    let mut conv = 0.0;
    for i in 0..m {
        let eps = e_lo + i as f64 * de;
        let nu = match weight.process {
            Process::Emission => omega - eps,
            Process::Absorption => omega + eps,
        };
        conv += ew[i] * weight.value(nu) * kernel[i];
    }
    let kappa_sq = (-bath.propagator_at(0).re).exp();
    Ok(kappa_sq * (1.0 + conv / (PI * f0)))
}

/// Polaron-frame correlation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EcfPair {
    Xx,
    Yy,
    Zz,
    Xz,
}

/// Half-sided transforms of sinh²(φ/2) and sinh(φ) for φ = φ₁ + φ₂.
///
/// Building this once per dimer lets every ECF be read off at the few
/// frequencies the generator needs.
#[derive(Debug, Clone)]
pub struct EcfKernel {
    dt: f64,
    sinh_sq_half: Vec<Complex64>,
    sinh_full: Vec<Complex64>,
}

impl EcfKernel {
    pub fn new(bath1: &PhononBath, bath2: &PhononBath) -> Self {
        let n = bath1.grid_len().max(bath2.grid_len());
        let dt = PROPAGATOR_DT;
        let w = simpson_weights(n, dt);
        let mut sinh_sq_half = Vec::with_capacity(n);
        let mut sinh_full = Vec::with_capacity(n);
        for (k, wk) in w.iter().enumerate() {
            let phi = bath1.propagator_at(k) + bath2.propagator_at(k);
            let s = (phi * 0.5).sinh();
            sinh_sq_half.push(s * s * *wk);
            sinh_full.push(phi.sinh() * *wk);
        }
        EcfKernel {
            dt,
            sinh_sq_half,
            sinh_full,
        }
    }

    /// (∫e^{iωt}sinh²(φ/2)dt, ∫e^{iωt}sinh(φ)dt).
    pub fn transforms(&self, omega: f64) -> (Complex64, Complex64) {
        let step = Complex64::from_polar(1.0, omega * self.dt);
        let mut ph = Complex64::new(1.0, 0.0);
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for (k, (x, y)) in self.sinh_sq_half.iter().zip(&self.sinh_full).enumerate() {
            if k % 256 == 0 {
                ph = Complex64::from_polar(1.0, omega * self.dt * k as f64);
            }
            a += x * ph;
            b += y * ph;
            ph *= step;
        }
        (a, b)
    }

    pub fn ecf(&self, cprime: f64, chi: f64, pair: EcfPair, omega: f64) -> Complex64 {
        let (t1, t2) = self.transforms(omega);
        ecf_parts(cprime, chi, pair, t1, t2)
    }
}

/// Assembles ζ_ab from precomputed sinh²(φ/2) and sinh(φ) transforms.
pub fn ecf_parts(cprime: f64, chi: f64, pair: EcfPair, t1: Complex64, t2: Complex64) -> Complex64 {
    let c2 = cprime * cprime;
    let (s, c) = chi.sin_cos();
    match pair {
        EcfPair::Xx => t1 * (c * c * c2 / 2.0),
        EcfPair::Zz => t1 * (s * s * c2 / 2.0),
        EcfPair::Xz => t1 * (s * c * c2 / 2.0),
        EcfPair::Yy => t2 * (c2 / 4.0),
    }
}

/// ζ_ab(ω) = ∫₀^∞ e^{iωt}⟨B_a†(t)B_b(0)⟩dt.
pub fn phonon_ecf(
    bath1: &PhononBath,
    bath2: &PhononBath,
    cprime: f64,
    chi: f64,
    pair: EcfPair,
    omega: f64,
) -> Complex64 {
    if cprime == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    EcfKernel::new(bath1, bath2).ecf(cprime, chi, pair, omega)
}
