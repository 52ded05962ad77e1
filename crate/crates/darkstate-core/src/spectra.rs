//! Absorption and emission spectra from the regression theorem, with the
//! polaron sideband applied in the time domain, and the sideband and
//! dark-peak diagnostics built on them.
//!
//! The optical coherences (ρ₊₀, ρ₋₀) evolve under a 2×2 generator, so every
//! correlator is a sum of two damped exponentials. The zero-phonon part of a
//! spectrum is therefore a sum of Lorentzians and is handled in closed form;
//! only the sideband factor e^{φ(τ)} − 1 needs numerical quadrature.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::liouvillian::{idx, optical_coherence_generator, Basis, DensityVector};
use crate::phonon::{PhononBath, Process};
use crate::quad::simpson_weights;
use crate::rates::{DimerParameters, RateSet};

type C = Complex64;

/// Tail residual of the bath propagator above which a spectrum is flagged.
pub const HORIZON_WARNING_RESIDUAL: f64 = 1e-6;

/// g_ij(τ) = Σ_k a[i][j][k] e^{λ_k τ} for sites i, j and modes k.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlators {
    pub process: Process,
    pub eigenvalues: [C; 2],
    pub amplitudes: [[[C; 2]; 2]; 2],
}

impl Correlators {
    pub fn at(&self, tau: f64) -> [[C; 2]; 2] {
        let e = [(self.eigenvalues[0] * tau).exp(), (self.eigenvalues[1] * tau).exp()];
        let mut g = [[C::new(0.0, 0.0); 2]; 2];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, gij) in row.iter_mut().enumerate() {
                let a = &self.amplitudes[i][j];
                *gij = a[0] * e[0] + a[1] * e[1];
            }
        }
        g
    }

    pub fn evaluate(&self, tau_grid: &[f64]) -> Vec<[[C; 2]; 2]> {
        tau_grid.iter().map(|&t| self.at(t)).collect()
    }

    /// Linewidth Γ_k and centre Ω_k of each mode, from λ_k = −Γ_k − iΩ_k.
    pub fn lines(&self) -> [(f64, f64); 2] {
        [
            (-self.eigenvalues[0].re, -self.eigenvalues[0].im),
            (-self.eigenvalues[1].re, -self.eigenvalues[1].im),
        ]
    }
}

/// ⟨j|k⟩ for site j and eigenstate k ∈ {+, −}.
fn site_overlaps(chi: f64) -> [[f64; 2]; 2] {
    let (s, c) = (0.5 * chi).sin_cos();
    [[c, -s], [s, c]]
}

/// Mode projectors of a 2×2 generator.
fn spectral_projectors(m: &Matrix2<C>) -> Result<([C; 2], [Matrix2<C>; 2])> {
    let off = m[(0, 1)].norm() + m[(1, 0)].norm();
    if off == 0.0 {
        let p0 = Matrix2::new(C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
        let p1 = Matrix2::identity() - p0;
        return Ok(([m[(0, 0)], m[(1, 1)]], [p0, p1]));
    }
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let mut disc = (half_diff * half_diff + m[(0, 1)] * m[(1, 0)]).sqrt();
    // Keep λ₀ on the branch continuous with m₀₀.
    if (half_diff.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if disc.norm() <= 1e-14 * scale {
        return Err(Error::Numerical("optical coherence generator is defective".into()));
    }
    let l = [half_tr + disc, half_tr - disc];
    let id = Matrix2::<C>::identity();
    let p0 = (m - id * l[1]) / (l[0] - l[1]);
    let p1 = (m - id * l[0]) / (l[1] - l[0]);
    Ok((l, [p0, p1]))
}

/// Regression-theorem correlators from the isolated-dimer steady state.
///
/// Absorption starts from σ_j⁺ρ, i.e. ⟨k|j⟩ρ₀₀ in the coherence sector.
/// Emission starts from ⟨k|ρ|j⟩ and is returned conjugated, so both
/// processes place their lines at positive frequency.
pub fn qrt_correlators(rates: &RateSet, steady: &DensityVector, process: Process) -> Result<Correlators> {
    if steady.basis != Basis::Dimer {
        return Err(Error::invalid("correlators need the isolated-dimer steady state"));
    }
    let u = site_overlaps(rates.eigen.chi);
    let m = optical_coherence_generator(rates);
    let (eigenvalues, proj) = spectral_projectors(&m)?;
    let rho = &steady.components;
    let ket = |j: usize| -> Vector2<C> {
        match process {
            Process::Absorption => Vector2::new(rho[idx::G] * u[j][0], rho[idx::G] * u[j][1]),
            Process::Emission => Vector2::new(
                rho[idx::PP] * u[j][0] + rho[idx::PM] * u[j][1],
                rho[idx::MP] * u[j][0] + rho[idx::MM] * u[j][1],
            ),
        }
    };
    let mut amplitudes = [[[C::new(0.0, 0.0); 2]; 2]; 2];
    for j in 0..2 {
        let v0 = ket(j);
        for (k, p) in proj.iter().enumerate() {
            let w = p * v0;
            for i in 0..2 {
                amplitudes[i][j][k] = w[0] * u[i][0] + w[1] * u[i][1];
            }
        }
    }
    Ok(Correlators {
        process,
        eigenvalues,
        amplitudes,
    })
}

/// Monomer photon weights γ_jj = γ_j(δ_j′) and γ₁₂ = √(γ₁γ₂)F.
pub fn photon_weights(params: &DimerParameters) -> [[f64; 2]; 2] {
    let [m1, m2] = &params.monomers;
    let g1 = m1.bare_rate(m1.splitting);
    let g2 = m2.bare_rate(m2.splitting);
    let f = params.cross(0.5 * (m1.splitting + m2.splitting));
    let g12 = (g1 * g2).sqrt() * f;
    [[g1, g12], [g12, g2]]
}

/// A spectrum in closed form over ω: Lorentzian zero-phonon lines plus a
/// sideband transform on the bath time grid.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub process: Process,
    pub correlators: Correlators,
    pub weights: [[f64; 2]; 2],
    pub kappa: [f64; 2],
    /// Zero-phonon residue of each mode.
    zpl_residues: [C; 2],
    /// Sideband integrand on the bath grid, Simpson weights folded in.
    sideband_kernel: Vec<C>,
    dt: f64,
    pub horizon_warning: bool,
}

impl SpectralModel {
    pub fn new(params: &DimerParameters, rates: &RateSet, steady: &DensityVector, process: Process) -> Result<Self> {
        let correlators = qrt_correlators(rates, steady, process)?;
        let weights = photon_weights(params);
        let baths = [&params.monomers[0].bath, &params.monomers[1].bath];
        Self::assemble(correlators, weights, rates.kappa, baths)
    }

    fn assemble(
        correlators: Correlators,
        weights: [[f64; 2]; 2],
        kappa: [f64; 2],
        baths: [&PhononBath; 2],
    ) -> Result<Self> {
        let a = &correlators.amplitudes;
        let mut zpl_residues = [C::new(0.0, 0.0); 2];
        for (k, res) in zpl_residues.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    *res += weights[i][j] * kappa[i] * kappa[j] * a[i][j][k];
                }
            }
        }

        let dt = baths[0].grid_step();
        if (baths[1].grid_step() - dt).abs() > 1e-15 {
            return Err(Error::invalid("bath grids use different time steps"));
        }
        let n = baths[0].grid_len().max(baths[1].grid_len());
        let tw = simpson_weights(n, dt);
        let lam = correlators.eigenvalues;
        let sideband_kernel: Vec<C> = (0..n)
            .map(|step| {
                let tau = step as f64 * dt;
                let e = [(lam[0] * tau).exp(), (lam[1] * tau).exp()];
                let mut acc = C::new(0.0, 0.0);
                for (j, bath) in baths.iter().enumerate() {
                    if bath.lambda() == 0.0 || step >= bath.grid_len() {
                        continue;
                    }
                    let phi = match correlators.process {
                        Process::Absorption => bath.propagator_at(step),
                        Process::Emission => bath.propagator_at(step).conj(),
                    };
                    let g = a[j][j][0] * e[0] + a[j][j][1] * e[1];
                    acc += weights[j][j] * kappa[j] * kappa[j] * (phi.exp() - 1.0) * g;
                }
                acc * tw[step]
            })
            .collect();
        let horizon_warning = baths
            .iter()
            .any(|b| b.lambda() > 0.0 && b.tail_residual() > HORIZON_WARNING_RESIDUAL);
        Ok(SpectralModel {
            process: correlators.process,
            correlators,
            weights,
            kappa,
            zpl_residues,
            sideband_kernel,
            dt,
            horizon_warning,
        })
    }

    /// Zero-phonon intensity Σ_k Re[c_k/(Γ_k − i(ω − Ω_k))].
    pub fn zero_phonon(&self, omega: f64) -> f64 {
        self.correlators
            .lines()
            .iter()
            .zip(&self.zpl_residues)
            .map(|(&(gamma, centre), c)| (c / C::new(gamma, centre - omega)).re)
            .sum()
    }

    /// Sideband intensity Re∫e^{iωτ}Σ_jγ_jjκ_j²(e^{φ_j}−1)g_jj(τ)dτ.
    pub fn sideband(&self, omega: f64) -> f64 {
        let step = C::from_polar(1.0, omega * self.dt);
        let mut phase = C::new(1.0, 0.0);
        let mut acc = 0.0;
        for (k, h) in self.sideband_kernel.iter().enumerate() {
            if k % 256 == 0 {
                phase = C::from_polar(1.0, omega * self.dt * k as f64);
            }
            acc += (h * phase).re;
            phase *= step;
        }
        acc
    }

    pub fn intensity(&self, omega: f64, with_sideband: bool) -> f64 {
        let zpl = self.zero_phonon(omega);
        if with_sideband {
            zpl + self.sideband(omega)
        } else {
            zpl
        }
    }

    /// Exact zero-phonon area on [a, b].
    pub fn zero_phonon_area(&self, a: f64, b: f64) -> f64 {
        self.correlators
            .lines()
            .iter()
            .zip(&self.zpl_residues)
            .map(|(&(gamma, centre), c)| {
                let (xa, xb) = (a - centre, b - centre);
                c.re * ((xb / gamma).atan() - (xa / gamma).atan())
                    - c.im * 0.5 * ((gamma * gamma + xb * xb) / (gamma * gamma + xa * xa)).ln()
            })
            .sum()
    }

    /// π Σ γ_ij D_ij(0) Re g_ij(0): the area over all frequencies.
    pub fn parseval_area(&self, with_sideband: bool) -> f64 {
        let g0 = self.correlators.at(0.0);
        let mut total = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                // κ_j²e^{φ_j(0)} = 1 on the diagonal.
                let dressing = if i == j && with_sideband {
                    1.0
                } else {
                    self.kappa[i] * self.kappa[j]
                };
                total += self.weights[i][j] * dressing * g0[i][j].re;
            }
        }
        std::f64::consts::PI * total
    }

    /// Collective-to-individual ratio ν = 2γ₁₂Re g₁₂(0) / Σ_j γ_jj g_jj(0).
    pub fn collective_ratio(&self) -> Result<f64> {
        let g0 = self.correlators.at(0.0);
        let individual = self.weights[0][0] * g0[0][0].re + self.weights[1][1] * g0[1][1].re;
        if !(individual > 0.0) {
            return Err(Error::Numerical("vanishing individual spectral weight".into()));
        }
        Ok(2.0 * self.weights[0][1] * g0[0][1].re / individual)
    }

    /// Sample the spectrum on a uniform grid.
    pub fn spectrum(&self, lo: f64, hi: f64, points: usize, with_sideband: bool) -> Result<Spectrum> {
        ensure_finite("spectrum lower bound", lo)?;
        ensure_finite("spectrum upper bound", hi)?;
        if !(hi > lo) || points < 4 {
            return Err(Error::invalid("spectrum grid needs hi > lo and at least four points"));
        }
        let h = (hi - lo) / (points - 1) as f64;
        let omega: Vec<f64> = (0..points).map(|i| lo + i as f64 * h).collect();
        let sidebands: Vec<f64> = if with_sideband {
            omega.par_iter().map(|&w| self.sideband(w)).collect()
        } else {
            vec![0.0; points]
        };
        let intensity: Vec<f64> = omega
            .iter()
            .zip(&sidebands)
            .map(|(&w, sb)| self.zero_phonon(w) + sb)
            .collect();
        let sideband_area = simpson_weights(points, h)
            .iter()
            .zip(&sidebands)
            .map(|(w, s)| w * s)
            .sum();
        Ok(Spectrum {
            process: self.process,
            with_sideband,
            omega,
            intensity,
            zpl_area: self.zero_phonon_area(lo, hi),
            sideband_area,
            parseval_area: self.parseval_area(with_sideband),
            horizon_warning: self.horizon_warning,
        })
    }

    /// Default plotting window: the sideband side gets 1.5 eV, the other 0.5 eV.
    pub fn default_window(&self, rates: &RateSet) -> (f64, f64) {
        let (lo, hi) = (rates.eigen.delta_minus, rates.eigen.delta_plus);
        match self.process {
            Process::Emission => (lo - 1.5, hi + 0.5),
            Process::Absorption => (lo - 0.5, hi + 1.5),
        }
    }

    /// Wide window holding essentially all sideband weight.
    pub fn full_window(&self, rates: &RateSet) -> (f64, f64) {
        let (lo, hi) = (rates.eigen.delta_minus, rates.eigen.delta_plus);
        match self.process {
            Process::Emission => (lo - 3.0, hi + 1.0),
            Process::Absorption => (lo - 1.0, hi + 3.0),
        }
    }
}

pub const DEFAULT_SPECTRUM_POINTS: usize = 4000;

/// A sampled spectrum with its area bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub process: Process,
    pub with_sideband: bool,
    pub omega: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Exact zero-phonon area inside the window. The lines are far narrower
    /// than any practical grid, so they are never integrated from samples.
    pub zpl_area: f64,
    /// Simpson area of the sideband samples.
    pub sideband_area: f64,
    /// Area over all frequencies from the τ = 0 correlators.
    pub parseval_area: f64,
    pub horizon_warning: bool,
}

impl Spectrum {
    pub fn total_area(&self) -> f64 {
        self.zpl_area + self.sideband_area
    }

    pub fn variant_label(&self) -> &'static str {
        if self.with_sideband {
            "with-sideband"
        } else {
            "without-sideband"
        }
    }
}

/// Numeric f^pn = (A_T − A_γ)/A_T from a with/without-sideband pair.
pub fn f_pn(with_sideband: &Spectrum, without_sideband: &Spectrum) -> Result<f64> {
    if with_sideband.omega != without_sideband.omega {
        return Err(Error::invalid("spectra must share one frequency grid"));
    }
    let a_t = with_sideband.total_area();
    let a_g = without_sideband.total_area();
    if !(a_t > 0.0) {
        return Err(Error::Numerical(format!("degenerate spectrum: total area {a_t}")));
    }
    Ok((a_t - a_g) / a_t)
}

/// Sideband fraction straight from a model over a window.
pub fn f_pn_window(model: &SpectralModel, lo: f64, hi: f64, points: usize) -> Result<f64> {
    let s = model.spectrum(lo, hi, points, true)?;
    let a_t = s.total_area();
    if !(a_t > 0.0) {
        return Err(Error::Numerical(format!("degenerate spectrum: total area {a_t}")));
    }
    Ok(s.sideband_area / a_t)
}

/// f^pn = (1 − κ²)/(1 + κ²ν).
pub fn f_pn_analytic(kappa_sq: f64, nu: f64) -> Result<f64> {
    ensure_finite("kappa squared", kappa_sq)?;
    ensure_finite("collective ratio", nu)?;
    if !(0.0..=1.0).contains(&kappa_sq) {
        return Err(Error::invalid(format!("kappa squared {kappa_sq} outside [0, 1]")));
    }
    let denominator = 1.0 + kappa_sq * nu;
    if !(denominator > 0.0) {
        return Err(Error::Numerical("degenerate spectrum: A_T <= 0".into()));
    }
    Ok((1.0 - kappa_sq) / denominator)
}

/// Homodimer emission ratio ν ≈ −F sign(C).
pub fn nu_homodimer_emission(cross: f64, coupling: f64) -> f64 {
    -cross * coupling.signum()
}

/// Heterodimer emission ratio ν ≈ −γ₁₂(εP₋₋ − 2Re P₊₋)/(P₊₊γ₁ + P₋₋γ₂), ε = C′/Δ.
pub fn nu_heterodimer_emission(params: &DimerParameters, steady: &DensityVector) -> Result<f64> {
    let es = params.eigensystem()?;
    if es.detuning == 0.0 {
        return Err(Error::invalid("heterodimer estimate needs a nonzero detuning"));
    }
    let w = photon_weights(params);
    let eps = es.cprime / es.detuning;
    let p = &steady.components;
    let denom = p[idx::PP].re * w[0][0] + p[idx::MM].re * w[1][1];
    if !(denom > 0.0) {
        return Err(Error::Numerical("vanishing excited population".into()));
    }
    Ok(-w[0][1] * (eps * p[idx::MM].re - 2.0 * p[idx::PM].re) / denom)
}

/// Area above the half-maximum chord of the peak near `peak_freq`.
///
/// The peak is the local maximum within three linewidths of `peak_freq`,
/// where the linewidth is that of the nearest zero-phonon mode.
pub fn peak_area_above_half_max(model: &SpectralModel, peak_freq: f64, with_sideband: bool) -> Result<f64> {
    let (width, _) = model
        .correlators
        .lines()
        .iter()
        .copied()
        .min_by(|a, b| {
            (a.1 - peak_freq)
                .abs()
                .partial_cmp(&(b.1 - peak_freq).abs())
                .expect("finite line centres")
        })
        .expect("two modes");
    if !(width > 0.0) {
        return Err(Error::Numerical("zero-phonon line has no width".into()));
    }
    let f = |w: f64| model.intensity(w, with_sideband);
    let n = 601;
    let h = 6.0 * width / (n - 1) as f64;
    let mut best = (peak_freq, f64::NEG_INFINITY, 0usize);
    for i in 0..n {
        let w = peak_freq - 3.0 * width + i as f64 * h;
        let v = f(w);
        if v > best.1 {
            best = (w, v, i);
        }
    }
    if best.2 == 0 || best.2 == n - 1 {
        return Err(Error::Numerical(format!("no peak found near {peak_freq} eV")));
    }
    let (top, peak) = (best.0, best.1);
    if !(peak > 0.0) {
        return Err(Error::Numerical(format!("no peak found near {peak_freq} eV")));
    }
    let half = 0.5 * peak;
    let crossing = |dir: f64| -> Result<f64> {
        let mut inner = top;
        let mut step = 0.25 * width;
        let mut outer = top + dir * step;
        while f(outer) > half {
            inner = outer;
            step *= 2.0;
            outer = top + dir * step;
            if step > 1e3 * width {
                return Err(Error::Numerical("half-maximum crossing not found".into()));
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (inner + outer);
            if f(mid) > half {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        Ok(0.5 * (inner + outer))
    };
    let left = crossing(-1.0)?;
    let right = crossing(1.0)?;
    let m = 2001;
    let hh = (right - left) / (m - 1) as f64;
    let area: f64 = simpson_weights(m, hh)
        .iter()
        .enumerate()
        .map(|(i, w)| w * (f(left + i as f64 * hh) - half))
        .sum();
    Ok(area)
}

/// P_d: dark-peak area above its half-maximum chord relative to a reference.
pub fn dark_peak_intensity(
    model: &SpectralModel,
    reference: &SpectralModel,
    peak_freq: f64,
    reference_peak_freq: f64,
) -> Result<f64> {
    let a = peak_area_above_half_max(model, peak_freq, true)?;
    let r = peak_area_above_half_max(reference, reference_peak_freq, true)?;
    if !(r > 0.0) {
        return Err(Error::Numerical("reference dark peak has no area".into()));
    }
    Ok(a / r)
}

/// Sideband and dark-peak summary for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandDiagnostics {
    pub f_pn_a: f64,
    pub f_pn_e: f64,
    pub f_pn_a_analytic: f64,
    pub f_pn_e_analytic: f64,
    pub nu_a: f64,
    pub nu_e: f64,
    /// Absorption and emission P_d, when a reference was supplied.
    pub p_d: Option<[f64; 2]>,
}

/// Spectra, steady state and rates bundled for one dimer.
#[derive(Debug, Clone)]
pub struct DimerSpectra {
    pub rates: RateSet,
    pub steady: DensityVector,
    pub absorption: SpectralModel,
    pub emission: SpectralModel,
}

impl DimerSpectra {
    pub fn new(params: &DimerParameters, variant: crate::special::Variant) -> Result<Self> {
        let rates = RateSet::compute(params, variant)?;
        let l = crate::liouvillian::build_total_liouvillian(&rates, variant);
        let steady = crate::liouvillian::steady_state(&l)?;
        let absorption = SpectralModel::new(params, &rates, &steady, Process::Absorption)?;
        let emission = SpectralModel::new(params, &rates, &steady, Process::Emission)?;
        Ok(DimerSpectra {
            rates,
            steady,
            absorption,
            emission,
        })
    }

    pub fn model(&self, process: Process) -> &SpectralModel {
        match process {
            Process::Absorption => &self.absorption,
            Process::Emission => &self.emission,
        }
    }

    /// Frequency of the dressed |−⟩ line.
    pub fn dark_frequency(&self) -> f64 {
        self.rates.dressed_minus_energy()
    }

    /// Sideband fractions over the wide windows plus optional P_d.
    pub fn diagnostics(&self, points: usize, reference: Option<&DimerSpectra>) -> Result<SidebandDiagnostics> {
        let k2 = self.rates.kappa[0] * self.rates.kappa[1];
        let frac = |m: &SpectralModel| {
            let (lo, hi) = m.full_window(&self.rates);
            f_pn_window(m, lo, hi, points)
        };
        let nu_a = self.absorption.collective_ratio()?;
        let nu_e = self.emission.collective_ratio()?;
        let p_d = match reference {
            None => None,
            Some(r) => Some([
                dark_peak_intensity(
                    &self.absorption,
                    &r.absorption,
                    self.dark_frequency(),
                    r.dark_frequency(),
                )?,
                dark_peak_intensity(&self.emission, &r.emission, self.dark_frequency(), r.dark_frequency())?,
            ]),
        };
        Ok(SidebandDiagnostics {
            f_pn_a: frac(&self.absorption)?,
            f_pn_e: frac(&self.emission)?,
            f_pn_a_analytic: f_pn_analytic(k2, nu_a)?,
            f_pn_e_analytic: f_pn_analytic(k2, nu_e)?,
            nu_a,
            nu_e,
            p_d,
        })
    }
}
