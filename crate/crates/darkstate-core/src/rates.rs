//! Eigenstructure of the dimer and every rate coefficient feeding the
//! photon and phonon generators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};
use crate::geometry::{dipole_dipole_coupling, CouplingConvention, DipoleGeometry};
use crate::phonon::{EcfKernel, EcfPair, PhononBath, PhotonSpectralFunction, Process};
use crate::quad::minimize_log;
use crate::special::{cgf, cross_function, Variant};
use crate::units::{bare_rate, bose, lifetime_to_dipole, nm_to_inv_ev};

/// One chromophore: renormalized splitting δ′ (eV), dipole (e·nm), bath.
#[derive(Debug, Clone)]
pub struct Monomer {
    pub splitting: f64,
    pub dipole: f64,
    pub bath: PhononBath,
}

impl Monomer {
    pub fn new(splitting: f64, dipole: f64, bath: PhononBath) -> Result<Self> {
        ensure_positive("monomer splitting", splitting)?;
        ensure_non_negative("dipole", dipole)?;
        Ok(Monomer {
            splitting,
            dipole,
            bath,
        })
    }

    /// Dipole fixed by the radiative lifetime at the monomer's own splitting.
    pub fn from_lifetime(splitting: f64, lifetime_ns: f64, bath: PhononBath) -> Result<Self> {
        let dipole = lifetime_to_dipole(lifetime_ns, splitting)?;
        Self::new(splitting, dipole, bath)
    }

    /// Bare rate γ(ω).
    pub fn bare_rate(&self, omega: f64) -> f64 {
        bare_rate(self.dipole, omega)
    }

    fn zeta(&self, omega: f64, photon_temperature: f64, process: Process) -> Result<f64> {
        if process == Process::Absorption && bose(omega, photon_temperature) == 0.0 {
            // Zero-temperature limit of the occupation ratio kills every
            // shifted term.
            return Ok((-self.bath.phi0_zero_temperature()).exp());
        }
        let weight = PhotonSpectralFunction {
            dipole: self.dipole.max(1e-12),
            temperature: photon_temperature,
            process,
        };
        crate::phonon::zeta_approx(&self.bath, &weight, omega)
    }
}

/// Which form of the cross function enters the interference terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossFunctionMode {
    /// F → d̂₁·d̂₂, valid for ω r₁₂ ≪ 1.
    #[default]
    Limit,
    /// F(ω r₁₂) in full.
    Full,
}

#[derive(Debug, Clone)]
pub struct DimerParameters {
    pub monomers: [Monomer; 2],
    pub geometry: DipoleGeometry,
    /// Photon temperature in K.
    pub photon_temperature: f64,
    pub coupling_convention: CouplingConvention,
    pub cross_function: CrossFunctionMode,
    /// Fixes the bare coupling C (eV) instead of deriving it from geometry.
    pub coupling_override: Option<f64>,
}

impl DimerParameters {
    pub fn new(monomers: [Monomer; 2], geometry: DipoleGeometry, photon_temperature: f64) -> Result<Self> {
        ensure_non_negative("photon temperature", photon_temperature)?;
        Ok(DimerParameters {
            monomers,
            geometry,
            photon_temperature,
            coupling_convention: CouplingConvention::default(),
            cross_function: CrossFunctionMode::default(),
            coupling_override: None,
        })
    }

    pub fn with_cross_function(mut self, mode: CrossFunctionMode) -> Self {
        self.cross_function = mode;
        self
    }

    pub fn with_coupling_override(mut self, coupling: Option<f64>) -> Self {
        self.coupling_override = coupling;
        self
    }

    pub fn with_coupling_convention(mut self, convention: CouplingConvention) -> Self {
        self.coupling_convention = convention;
        self
    }

    /// Bare static coupling C in eV.
    pub fn coupling(&self) -> Result<f64> {
        match self.coupling_override {
            Some(c) => {
                ensure_finite("coupling", c)?;
                Ok(c)
            }
            None => dipole_dipole_coupling(
                &self.geometry,
                self.monomers[0].dipole,
                self.monomers[1].dipole,
                self.coupling_convention,
            ),
        }
    }

    pub fn kappas(&self) -> [f64; 2] {
        [self.monomers[0].bath.kappa(), self.monomers[1].bath.kappa()]
    }

    /// Renormalized coupling C′ = κ₁κ₂C.
    pub fn cprime(&self) -> Result<f64> {
        let [k1, k2] = self.kappas();
        Ok(k1 * k2 * self.coupling()?)
    }

    pub fn eigensystem(&self) -> Result<EigenSystem> {
        Ok(EigenSystem::new(
            self.monomers[0].splitting,
            self.monomers[1].splitting,
            self.cprime()?,
        ))
    }

    /// Dipole magnitude ratio z = d₂/d₁.
    pub fn dipole_ratio(&self) -> f64 {
        self.monomers[1].dipole / self.monomers[0].dipole
    }

    /// Cross function at transition energy ω.
    pub fn cross(&self, omega: f64) -> f64 {
        let f = self.geometry.orientation;
        match self.cross_function {
            CrossFunctionMode::Limit => f.dot(),
            CrossFunctionMode::Full => cross_function(omega * nm_to_inv_ev(self.geometry.r12), f),
        }
    }

    fn cgf_at(&self, omega: f64, variant: Variant) -> Result<f64> {
        cgf(
            omega * nm_to_inv_ev(self.geometry.r12),
            self.geometry.orientation,
            variant,
        )
    }

    /// Γ₋^E alone; skips the phonon block.
    pub fn minus_emission_rate(&self) -> Result<f64> {
        let es = self.eigensystem()?;
        if es.delta_minus <= 0.0 {
            return Err(Error::invalid("lower eigenstate sits below the ground state"));
        }
        let [m1, m2] = &self.monomers;
        let w = es.delta_minus;
        let z1 = m1.zeta(w, self.photon_temperature, Process::Emission)?;
        let z2 = m2.zeta(w, self.photon_temperature, Process::Emission)?;
        let [k1, k2] = self.kappas();
        Ok(collective_rate(
            &es,
            false,
            [z1 * m1.bare_rate(w), z2 * m2.bare_rate(w)],
            k1 * k2 * (m1.bare_rate(w) * m2.bare_rate(w)).sqrt() * self.cross(w),
        ))
    }

    /// ζ-renormalized own emission rate of monomer j at its splitting.
    pub fn monomer_emission_rate(&self, j: usize) -> Result<f64> {
        let m = &self.monomers[j];
        Ok(m.zeta(m.splitting, self.photon_temperature, Process::Emission)? * m.bare_rate(m.splitting))
    }

    /// ζ-renormalized own absorption coefficient (without N) of monomer j.
    pub fn monomer_absorption_rate(&self, j: usize) -> Result<f64> {
        let m = &self.monomers[j];
        Ok(m.zeta(m.splitting, self.photon_temperature, Process::Absorption)? * m.bare_rate(m.splitting))
    }
}

/// Eigenstates |±⟩ of the polaron-frame system Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub delta1p: f64,
    pub delta2p: f64,
    /// Δ = δ₁′ − δ₂′.
    pub detuning: f64,
    pub cprime: f64,
    pub eta: f64,
    pub chi: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

impl EigenSystem {
    pub fn new(delta1p: f64, delta2p: f64, cprime: f64) -> Self {
        let detuning = delta1p - delta2p;
        let eta = detuning.hypot(cprime);
        let chi = cprime.atan2(detuning);
        let mean = 0.5 * (delta1p + delta2p);
        EigenSystem {
            delta1p,
            delta2p,
            detuning,
            cprime,
            eta,
            chi,
            delta_plus: mean + 0.5 * eta,
            delta_minus: mean - 0.5 * eta,
        }
    }

    pub fn cos_half(&self) -> f64 {
        (0.5 * self.chi).cos()
    }

    pub fn sin_half(&self) -> f64 {
        (0.5 * self.chi).sin()
    }
}

/// Γ± from renormalized monomer rates and the interference amplitude.
fn collective_rate(es: &EigenSystem, plus: bool, own: [f64; 2], interference: f64) -> f64 {
    let (c2, s2) = (es.cos_half().powi(2), es.sin_half().powi(2));
    let s = es.chi.sin();
    if plus {
        c2 * own[0] + s2 * own[1] + s * interference
    } else {
        s2 * own[0] + c2 * own[1] - s * interference
    }
}

/// Polaron-frame phonon rates at ±η and zero frequency.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhononRates {
    /// γ₊^pn(η): |+⟩ → |−⟩.
    pub gamma_plus_down: f64,
    /// γ₊^pn(−η): |−⟩ → |+⟩.
    pub gamma_plus_up: f64,
    pub gamma_minus_eta: f64,
    pub gamma_minus_neg_eta: f64,
    pub mu_plus_eta: f64,
    pub mu_plus_neg_eta: f64,
    pub mu_minus_eta: f64,
    pub mu_minus_neg_eta: f64,
    pub gamma_bar_plus: f64,
    pub gamma_bar_minus: f64,
    pub mu_bar_plus: f64,
    pub mu_bar_minus: f64,
    pub gamma_xz0: f64,
    pub s_xz0: f64,
    pub zeta_xz_eta: Complex64,
    pub zeta_xz_neg_eta: Complex64,
    pub gamma_zz0: f64,
    pub s_zz0: f64,
    /// Diagonal xx rates at ±η, kept for the KMS check.
    pub gamma_xx: [f64; 2],
    pub gamma_yy: [f64; 2],
}

impl PhononRates {
    pub fn compute(bath1: &PhononBath, bath2: &PhononBath, cprime: f64, chi: f64, eta: f64) -> Self {
        if cprime == 0.0 || (bath1.lambda() == 0.0 && bath2.lambda() == 0.0) {
            return PhononRates::default();
        }
        let kernel = EcfKernel::new(bath1, bath2);
        let (a_pos, b_pos) = kernel.transforms(eta);
        let (a_neg, b_neg) = kernel.transforms(-eta);
        let (a_0, _) = kernel.transforms(0.0);
        let ecf = |pair, t1, t2| crate::phonon::ecf_parts(cprime, chi, pair, t1, t2);

        let xx = [ecf(EcfPair::Xx, a_pos, b_pos), ecf(EcfPair::Xx, a_neg, b_neg)];
        let yy = [ecf(EcfPair::Yy, a_pos, b_pos), ecf(EcfPair::Yy, a_neg, b_neg)];
        let xz0 = ecf(EcfPair::Xz, a_0, a_0);
        let zz0 = ecf(EcfPair::Zz, a_0, a_0);
        let zeta_xz_eta = ecf(EcfPair::Xz, a_pos, b_pos);
        let zeta_xz_neg_eta = ecf(EcfPair::Xz, a_neg, b_neg);

        let g = |z: Complex64| 2.0 * z.re;
        let gp = [g(xx[0]) + g(yy[0]), g(xx[1]) + g(yy[1])];
        let gm = [g(xx[0]) - g(yy[0]), g(xx[1]) - g(yy[1])];
        let mp = [xx[0].im + yy[0].im, xx[1].im + yy[1].im];
        let mm = [xx[0].im - yy[0].im, xx[1].im - yy[1].im];
        PhononRates {
            gamma_plus_down: gp[0],
            gamma_plus_up: gp[1],
            gamma_minus_eta: gm[0],
            gamma_minus_neg_eta: gm[1],
            mu_plus_eta: mp[0],
            mu_plus_neg_eta: mp[1],
            mu_minus_eta: mm[0],
            mu_minus_neg_eta: mm[1],
            gamma_bar_plus: 0.5 * (gp[0] + gp[1]),
            gamma_bar_minus: 0.5 * (gm[0] + gm[1]),
            mu_bar_plus: mp[0] - mp[1],
            mu_bar_minus: mm[0] - mm[1],
            gamma_xz0: g(xz0),
            s_xz0: xz0.im,
            zeta_xz_eta,
            zeta_xz_neg_eta,
            gamma_zz0: g(zz0),
            s_zz0: zz0.im,
            gamma_xx: [g(xx[0]), g(xx[1])],
            gamma_yy: [g(yy[0]), g(yy[1])],
        }
    }

    /// Net |+⟩ → |−⟩ transfer rate.
    pub fn net_transfer(&self) -> f64 {
        self.gamma_plus_down - self.gamma_plus_up
    }
}

/// Everything the generators need, evaluated once per parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub variant: Variant,
    pub eigen: EigenSystem,
    pub kappa: [f64; 2],
    pub n_plus: f64,
    pub n_minus: f64,
    /// Bare monomer rates γ_j(δ₊).
    pub bare_plus: [f64; 2],
    /// Bare monomer rates γ_j(δ₋).
    pub bare_minus: [f64; 2],
    pub zeta_e_plus: [f64; 2],
    pub zeta_e_minus: [f64; 2],
    pub zeta_a_plus: [f64; 2],
    pub zeta_a_minus: [f64; 2],
    pub cross_plus: f64,
    pub cross_minus: f64,
    pub big_gamma_plus_a: f64,
    pub big_gamma_plus_e: f64,
    pub big_gamma_minus_a: f64,
    pub big_gamma_minus_e: f64,
    pub gamma_plus_a: f64,
    pub gamma_plus_e: f64,
    pub gamma_minus_a: f64,
    pub gamma_minus_e: f64,
    /// γ₊₋^E(δ±) as [plus, minus].
    pub gamma_pm_e: [f64; 2],
    /// γ₊₋^A(δ±) as [plus, minus].
    pub gamma_pm_a: [f64; 2],
    /// S₊₋(δ±).
    pub s_pm: [f64; 2],
    /// S₊₋(−δ±).
    pub s_pm_neg: [f64; 2],
    pub theta_plus: Complex64,
    pub theta_minus: Complex64,
    pub theta_tilde_plus: Complex64,
    pub theta_tilde_minus: Complex64,
    pub delta_tilde_plus: f64,
    pub delta_tilde_minus: f64,
    /// Virtual double-excitation couplings φ̃± (zero under the RWA).
    pub phi_tilde: [f64; 2],
    /// Splittings with the counter-rotating shifts added.
    pub delta_tilde_plus_f: f64,
    pub delta_tilde_minus_f: f64,
    /// Population-coherence oscillation frequencies ν±.
    pub nu: [f64; 2],
    pub phonon: PhononRates,
}

impl RateSet {
    pub fn compute(params: &DimerParameters, variant: Variant) -> Result<Self> {
        let es = params.eigensystem()?;
        if !(es.delta_minus > 0.0) {
            return Err(Error::invalid(format!(
                "lower eigenstate energy {} eV is not positive",
                es.delta_minus
            )));
        }
        let [m1, m2] = &params.monomers;
        let tg = params.photon_temperature;
        let kappa = params.kappas();
        let kk = kappa[0] * kappa[1];
        let (s, c) = es.chi.sin_cos();
        let (dp, dm) = (es.delta_plus, es.delta_minus);

        let bare_plus = [m1.bare_rate(dp), m2.bare_rate(dp)];
        let bare_minus = [m1.bare_rate(dm), m2.bare_rate(dm)];
        let zeta = |w: f64, p: Process| -> Result<[f64; 2]> { Ok([m1.zeta(w, tg, p)?, m2.zeta(w, tg, p)?]) };
        let zeta_e_plus = zeta(dp, Process::Emission)?;
        let zeta_e_minus = zeta(dm, Process::Emission)?;
        let zeta_a_plus = zeta(dp, Process::Absorption)?;
        let zeta_a_minus = zeta(dm, Process::Absorption)?;
        let cross_plus = params.cross(dp);
        let cross_minus = params.cross(dm);
        let root_plus = (bare_plus[0] * bare_plus[1]).sqrt();
        let root_minus = (bare_minus[0] * bare_minus[1]).sqrt();
        let inter_plus = kk * root_plus * cross_plus;
        let inter_minus = kk * root_minus * cross_minus;

        let own = |z: [f64; 2], g: [f64; 2]| [z[0] * g[0], z[1] * g[1]];
        let big_gamma_plus_a = collective_rate(&es, true, own(zeta_a_plus, bare_plus), inter_plus);
        let big_gamma_plus_e = collective_rate(&es, true, own(zeta_e_plus, bare_plus), inter_plus);
        let big_gamma_minus_a = collective_rate(&es, false, own(zeta_a_minus, bare_minus), inter_minus);
        let big_gamma_minus_e = collective_rate(&es, false, own(zeta_e_minus, bare_minus), inter_minus);

        let n_plus = bose(dp, tg);
        let n_minus = bose(dm, tg);

        // Non-secular cross rates γ₊₋^μ(ω) = −½ sinχ[ζ₁γ₁ − ζ₂γ₂] + κ₁κ₂cosχ√(γ₁γ₂)F.
        let cross_rate =
            |z: [f64; 2], g: [f64; 2], root: f64, f: f64| -0.5 * s * (z[0] * g[0] - z[1] * g[1]) + kk * c * root * f;
        let gamma_pm_e = [
            cross_rate(zeta_e_plus, bare_plus, root_plus, cross_plus),
            cross_rate(zeta_e_minus, bare_minus, root_minus, cross_minus),
        ];
        let gamma_pm_a = [
            cross_rate(zeta_a_plus, bare_plus, root_plus, cross_plus),
            cross_rate(zeta_a_minus, bare_minus, root_minus, cross_minus),
        ];

        let g_pos = [params.cgf_at(dp, variant)?, params.cgf_at(dm, variant)?];
        let g_neg = [params.cgf_at(-dp, variant)?, params.cgf_at(-dm, variant)?];
        // |γ(−ω)| = γ(ω) for the ω³ law, so the square roots reuse δ± values.
        let s_pm = [kk * c * root_plus * g_pos[0], kk * c * root_minus * g_pos[1]];
        let s_pm_neg = [kk * c * root_plus * g_neg[0], kk * c * root_minus * g_neg[1]];

        let theta_plus = Complex64::new(0.5 * gamma_pm_e[0] * (1.0 + n_plus), s_pm[0]);
        let theta_minus = Complex64::new(0.5 * gamma_pm_e[1] * (1.0 + n_minus), s_pm[1]);
        let theta_tilde_plus = Complex64::new(0.5 * gamma_pm_a[0] * n_plus, s_pm_neg[0]);
        let theta_tilde_minus = Complex64::new(0.5 * gamma_pm_a[1] * n_minus, s_pm_neg[1]);

        let delta_tilde_plus = dp + kk * s * root_plus * g_pos[0];
        let delta_tilde_minus = dm - kk * s * root_minus * g_pos[1];
        let (phi_tilde, delta_tilde_plus_f, delta_tilde_minus_f) = match variant {
            Variant::Rwa => ([0.0, 0.0], delta_tilde_plus, delta_tilde_minus),
            Variant::NonRwa => (
                s_pm_neg,
                delta_tilde_plus + kk * s * root_plus * g_neg[0],
                delta_tilde_minus - kk * s * root_minus * g_neg[1],
            ),
        };
        let nu = [2.0 * s_pm[0], 2.0 * s_pm[1]];

        let phonon = PhononRates::compute(&m1.bath, &m2.bath, es.cprime, es.chi, es.eta);

        Ok(RateSet {
            variant,
            eigen: es,
            kappa,
            n_plus,
            n_minus,
            bare_plus,
            bare_minus,
            zeta_e_plus,
            zeta_e_minus,
            zeta_a_plus,
            zeta_a_minus,
            cross_plus,
            cross_minus,
            big_gamma_plus_a,
            big_gamma_plus_e,
            big_gamma_minus_a,
            big_gamma_minus_e,
            gamma_plus_a: big_gamma_plus_a * n_plus,
            gamma_plus_e: big_gamma_plus_e * (1.0 + n_plus),
            gamma_minus_a: big_gamma_minus_a * n_minus,
            gamma_minus_e: big_gamma_minus_e * (1.0 + n_minus),
            gamma_pm_e,
            gamma_pm_a,
            s_pm,
            s_pm_neg,
            theta_plus,
            theta_minus,
            theta_tilde_plus,
            theta_tilde_minus,
            delta_tilde_plus,
            delta_tilde_minus,
            phi_tilde,
            delta_tilde_plus_f,
            delta_tilde_minus_f,
            nu,
            phonon,
        })
    }

    /// Δ̃ for the generator variant in use.
    pub fn renormalized_detuning(&self) -> f64 {
        match self.variant {
            Variant::Rwa => self.delta_tilde_plus - self.delta_tilde_minus,
            Variant::NonRwa => self.delta_tilde_plus_f - self.delta_tilde_minus_f,
        }
    }

    /// Dressed |−⟩ energy including half the phonon detuning shift.
    pub fn dressed_minus_energy(&self) -> f64 {
        self.delta_tilde_minus - 0.5 * self.phonon.mu_bar_plus
    }

    /// Dressed |+⟩ energy including half the phonon detuning shift.
    pub fn dressed_plus_energy(&self) -> f64 {
        self.delta_tilde_plus + 0.5 * self.phonon.mu_bar_plus
    }
}

pub fn rate_coefficients(params: &DimerParameters, variant: Variant) -> Result<RateSet> {
    RateSet::compute(params, variant)
}

/// Analytic dark-state condition with C′ held independent of z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRatio {
    pub z_c: f64,
    pub gamma_c_minus_e: f64,
    /// γ₁(δ₋), for normalizing the rate.
    pub gamma1: f64,
}

/// z_c = tan(χ/2)κ₁κ₂F/ζ₂^E(δ₋), Γ_c₋^E = sin²(χ/2)[ζ₁^E − (κ₁κ₂F)²/ζ₂^E]γ₁(δ₋).
pub fn critical_ratio(params: &DimerParameters) -> Result<CriticalRatio> {
    let es = params.eigensystem()?;
    let [m1, m2] = &params.monomers;
    let w = es.delta_minus;
    ensure_positive("lower eigenstate energy", w)?;
    let z1 = m1.zeta(w, params.photon_temperature, Process::Emission)?;
    let z2 = m2.zeta(w, params.photon_temperature, Process::Emission)?;
    let [k1, k2] = params.kappas();
    let kf = k1 * k2 * params.cross(w);
    let gamma1 = m1.bare_rate(w);
    Ok(CriticalRatio {
        z_c: (0.5 * es.chi).tan() * kf / z2,
        gamma_c_minus_e: es.sin_half().powi(2) * (z1 - kf * kf / z2) * gamma1,
        gamma1,
    })
}

/// How the coupling follows the dipole ratio during the z search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingScaling {
    /// C ∝ d₁d₂ = z d₁² at fixed separation.
    Full,
    /// C frozen at the template value.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZMinimum {
    pub z_min: f64,
    pub gamma_minus_e: f64,
    /// log₁₀(Γ₋^E/Γ₂^E) at z_min.
    pub log_ratio: f64,
    pub no_interior_minimum: bool,
    /// Self-consistent z_c, reported as the fallback when no interior minimum exists.
    pub z_c_star: f64,
}

/// Copy of `template` with d₂ = z·d₁ and the coupling rescaled per `scaling`.
pub fn with_dipole_ratio(template: &DimerParameters, z: f64, scaling: CouplingScaling) -> Result<DimerParameters> {
    ensure_positive("dipole ratio", z)?;
    let mut p = template.clone();
    let base_c = template.coupling()?;
    let z0 = template.dipole_ratio();
    p.monomers[1].dipole = z * template.monomers[0].dipole;
    p.coupling_override = match scaling {
        CouplingScaling::Full => template.coupling_override.map(|c| c * z / z0),
        CouplingScaling::Fixed => Some(base_c),
    };
    Ok(p)
}

/// Minimizes Γ₋^E over z ∈ [1e-3, 1] (log-golden search after a 64-point scan).
pub fn minimize_emission_over_z(template: &DimerParameters, scaling: CouplingScaling) -> Result<ZMinimum> {
    let eval = |z: f64| -> f64 {
        with_dipole_ratio(template, z, scaling)
            .and_then(|p| p.minus_emission_rate())
            .unwrap_or(f64::INFINITY)
    };
    let m = minimize_log(1e-3, 1.0, 64, 1e-4, eval);
    let p = with_dipole_ratio(template, m.x, scaling)?;
    let gamma_minus_e = p.minus_emission_rate()?;
    let gamma2 = p.monomer_emission_rate(1)?;
    let no_interior_minimum = m.on_boundary && m.x < 0.5;

    let mut z = 1.0;
    for _ in 0..100 {
        let q = with_dipole_ratio(template, z, scaling)?;
        let next = critical_ratio(&q)?.z_c.clamp(1e-6, 1.0);
        if (next - z).abs() < 1e-12 {
            z = next;
            break;
        }
        z = 0.5 * (z + next);
    }

    Ok(ZMinimum {
        z_min: m.x,
        gamma_minus_e,
        log_ratio: (gamma_minus_e / gamma2).log10(),
        no_interior_minimum,
        z_c_star: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigensystem_invariants() {
        let es = EigenSystem::new(2.8, 2.6, 0.001);
        assert!((es.eta - 0.200_002_5).abs() < 1e-9);
        assert!((es.chi.cos() - es.detuning / es.eta).abs() < 1e-12);
        assert!((es.chi.sin() - es.cprime / es.eta).abs() < 1e-12);
        assert!(es.delta_plus >= es.delta_minus);
    }

    #[test]
    fn homodimer_mixing_angle() {
        let es = EigenSystem::new(2.8, 2.8, 0.05);
        assert!((es.chi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let es = EigenSystem::new(2.8, 2.8, -0.05);
        assert!((es.chi + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
