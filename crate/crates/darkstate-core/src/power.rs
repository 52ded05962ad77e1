//! Trap power output, the independent-monomer benchmark, design points for
//! the power maps, and parameter sweeps.

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};
use crate::geometry::{separation_for_coupling, CouplingConvention, DipoleGeometry};
use crate::liouvillian::{
    build_total_liouvillian, compose_with_trap, steady_state, Liouvillian, TrapParameters, VoltageConvention,
};
use crate::phonon::{PhononBath, SpectralFamily};
use crate::quad::maximize_log;
use crate::rates::{CrossFunctionMode, DimerParameters, Monomer, RateSet};
use crate::special::Variant;
use crate::units::{bose, inverse_temperature, power_ev2_to_pw};

/// Search bracket for the trap decay rate, in eV.
pub const GAMMA_T_BRACKET: (f64, f64) = (1e-12, 1e-2);
/// Log-spaced samples before golden-section refinement.
pub const GAMMA_T_PRESCAN: usize = 32;
/// Relative tolerance on the optimal γ_t.
pub const GAMMA_T_TOLERANCE: f64 = 1e-3;

/// Voltage, current and power delivered to one trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    /// Trap voltage in V (eV per electron).
    pub voltage: f64,
    /// Current γ_t P_α in eV (times e).
    pub current: f64,
    /// Power in pW.
    pub power_pw: f64,
    pub gamma_t: f64,
    pub p_alpha: f64,
    pub p_beta: f64,
    /// Benchmark power in pW, when evaluated.
    pub benchmark_pw: Option<f64>,
    pub ratio: Option<f64>,
    /// The optimal γ_t sits on an edge of the search bracket.
    pub boundary_warning: bool,
    /// A trap population vanished; the voltage is the logarithm's limit
    /// and the power is reported as zero.
    pub zero_population: bool,
}

impl PowerResult {
    fn from_populations(trap: &TrapParameters, p_alpha: f64, p_beta: f64) -> Self {
        let (delta_t, gamma_t) = (trap.delta_t, trap.gamma_t);
        let current = gamma_t * p_alpha;
        let kt = 1.0 / inverse_temperature(trap.temperature);
        let sign = trap.voltage.sign();
        let zero_population = !(p_alpha > 0.0) || !(p_beta > 0.0);
        let (voltage, power_pw) = if zero_population {
            let v = if p_alpha > 0.0 {
                sign * f64::INFINITY
            } else {
                -sign * f64::INFINITY
            };
            (if kt == 0.0 { delta_t } else { v }, 0.0)
        } else {
            let v = delta_t + sign * kt * (p_alpha / p_beta).ln();
            (v, power_ev2_to_pw(current * v))
        };
        PowerResult {
            voltage,
            current,
            power_pw,
            gamma_t,
            p_alpha,
            p_beta,
            benchmark_pw: None,
            ratio: None,
            boundary_warning: false,
            zero_population,
        }
    }
}

/// Power from a dimer generator attached to `trap`.
pub fn power_from_generator(dimer: &Liouvillian, trap: &TrapParameters) -> Result<PowerResult> {
    let l = compose_with_trap(dimer, trap)?;
    let ss = steady_state(&l)?;
    let (pa, pb) = ss
        .trap_populations()
        .ok_or_else(|| Error::Numerical("composite state lost its trap".into()))?;
    Ok(PowerResult::from_populations(trap, pa, pb))
}

/// Power for a full parameter set at fixed trap parameters.
pub fn power_output(params: &DimerParameters, variant: Variant, trap: &TrapParameters) -> Result<PowerResult> {
    let r = RateSet::compute(params, variant)?;
    power_from_generator(&build_total_liouvillian(&r, variant), trap)
}

/// Maximizes power over γ_t on [`GAMMA_T_BRACKET`].
///
/// `power_at` maps γ_t to a result; failures count as zero power.
fn optimize_over_gamma_t(mut power_at: impl FnMut(f64) -> Result<PowerResult>) -> Result<PowerResult> {
    let (lo, hi) = GAMMA_T_BRACKET;
    let m = maximize_log(lo, hi, GAMMA_T_PRESCAN, GAMMA_T_TOLERANCE, |g| {
        power_at(g).map(|p| p.power_pw).unwrap_or(f64::NEG_INFINITY)
    });
    let mut best = power_at(m.x)?;
    best.boundary_warning = m.on_boundary;
    Ok(best)
}

/// Optimal γ_t for a dimer generator; `trap.gamma_t` is ignored.
pub fn optimize_gamma_t(dimer: &Liouvillian, trap: &TrapParameters) -> Result<PowerResult> {
    optimize_over_gamma_t(|g| power_from_generator(dimer, &TrapParameters { gamma_t: g, ..*trap }))
}

/// One monomer as a two-level system with its own trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomerTrapRates {
    pub splitting: f64,
    /// ζ^E γ (1 + N).
    pub emission: f64,
    /// ζ^A γ N.
    pub absorption: f64,
}

impl MonomerTrapRates {
    pub fn new(params: &DimerParameters, j: usize) -> Result<Self> {
        let m = &params.monomers[j];
        let n = bose(m.splitting, params.photon_temperature);
        Ok(MonomerTrapRates {
            splitting: m.splitting,
            emission: params.monomer_emission_rate(j)? * (1.0 + n),
            absorption: params.monomer_absorption_rate(j)? * n,
        })
    }

    /// Steady trap populations for states (g,α), (e,α), (g,β), (e,β).
    fn trap_populations(&self, gamma_x: f64, gamma_t: f64) -> Result<(f64, f64)> {
        let (a, e) = (self.absorption, self.emission);
        let mut m = Matrix4::<f64>::zeros();
        for block in [0usize, 2] {
            m[(block, block)] -= a;
            m[(block + 1, block)] += a;
            m[(block + 1, block + 1)] -= e;
            m[(block, block + 1)] += e;
        }
        for k in 0..2 {
            m[(k, k)] -= gamma_t;
            m[(k + 2, k)] += gamma_t;
        }
        m[(3, 3)] -= gamma_x;
        m[(0, 3)] += gamma_x;
        for j in 0..4 {
            m[(0, j)] = 1.0;
        }
        let rhs = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let p = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("monomer-trap steady state is singular".into()))?;
        Ok((p[0] + p[1], p[2] + p[3]))
    }

    pub fn power(&self, trap: &TrapParameters) -> Result<PowerResult> {
        trap.validate()?;
        if self.absorption == 0.0 {
            return Ok(PowerResult::from_populations(trap, 0.0, 1.0));
        }
        let (pa, pb) = self.trap_populations(trap.gamma_x, trap.gamma_t)?;
        Ok(PowerResult::from_populations(trap, pa, pb))
    }

    pub fn optimized_power(&self, gamma_x: f64, temperature: f64, voltage: VoltageConvention) -> Result<PowerResult> {
        let base = TrapParameters {
            delta_t: self.splitting,
            gamma_x,
            gamma_t: 0.0,
            temperature,
            voltage,
        };
        if self.absorption == 0.0 {
            return self.power(&base);
        }
        optimize_over_gamma_t(|g| self.power(&TrapParameters { gamma_t: g, ..base }))
    }
}

/// Independent monomers, each with its own optimized trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub monomers: [PowerResult; 2],
    pub total_pw: f64,
}

pub fn benchmark_power(
    params: &DimerParameters,
    gamma_x: f64,
    trap_temperature: f64,
    voltage: VoltageConvention,
) -> Result<BenchmarkResult> {
    ensure_non_negative("extraction rate", gamma_x)?;
    let p1 = MonomerTrapRates::new(params, 0)?.optimized_power(gamma_x, trap_temperature, voltage)?;
    let p2 = MonomerTrapRates::new(params, 1)?.optimized_power(gamma_x, trap_temperature, voltage)?;
    Ok(BenchmarkResult {
        monomers: [p1, p2],
        total_pw: p1.power_pw + p2.power_pw,
    })
}

/// Which splitting sets the trap energy δ_t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrapSplitting {
    /// δ̃₋ − μ̄₊/2, the renormalized |−⟩ energy.
    #[default]
    Dressed,
    /// δ₋.
    Bare,
}

impl TrapSplitting {
    pub fn value(self, r: &RateSet) -> f64 {
        match self {
            TrapSplitting::Dressed => r.dressed_minus_energy(),
            TrapSplitting::Bare => r.eigen.delta_minus,
        }
    }
}

/// Dimer power with optimized γ_t, benchmarked against independent monomers.
pub fn benchmarked_power(
    params: &DimerParameters,
    variant: Variant,
    gamma_x: f64,
    trap_temperature: f64,
    splitting: TrapSplitting,
    voltage: VoltageConvention,
) -> Result<(PowerResult, RateSet)> {
    let r = RateSet::compute(params, variant)?;
    let l = build_total_liouvillian(&r, variant);
    let trap = TrapParameters {
        delta_t: splitting.value(&r),
        gamma_x,
        gamma_t: 0.0,
        temperature: trap_temperature,
        voltage,
    };
    let mut p = optimize_gamma_t(&l, &trap)?;
    let b = benchmark_power(params, gamma_x, trap_temperature, voltage)?;
    p.benchmark_pw = Some(b.total_pw);
    p.ratio = Some(if b.total_pw > 0.0 {
        p.power_pw / b.total_pw
    } else {
        f64::NAN
    });
    Ok((p, r))
}

/// Population oscillation frequency √(Δ̃² + ν²) with ν the mean of ν±.
///
/// For Θ₊ = Θ₋ = iS the excited block is a two-level Hamiltonian with
/// coupling S, whose level splitting is √(Δ̃² + 4S²) and ν± = 2S.
pub fn nonsecular_frequency(r: &RateSet) -> f64 {
    let nu = 0.5 * (r.nu[0] + r.nu[1]);
    r.renormalized_detuning().hypot(nu)
}

/// A point of the power maps: monomer-1 at fixed splitting and lifetime,
/// monomer-2 scaled by z and detuned by Δ, the separation solved so that
/// the ideal-orientation renormalized coupling equals (C′/z)·z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignPoint {
    pub z: f64,
    /// Δ = δ₁′ − δ₂′ in eV.
    pub delta: f64,
    /// Reorganization energy λ in eV.
    pub lambda: f64,
    /// C′/z in eV.
    pub cprime_over_z: f64,
    /// Extraction rate in eV.
    pub gamma_x: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub theta12: f64,
    pub splitting1: f64,
    pub lifetime1_ns: f64,
    pub cutoff: f64,
    pub family: SpectralFamily,
    pub phonon_temperature: f64,
    pub photon_temperature: f64,
    pub trap_temperature: f64,
    pub coupling_convention: CouplingConvention,
    pub cross_function: CrossFunctionMode,
    pub trap_splitting: TrapSplitting,
    pub voltage: VoltageConvention,
    pub variant: Variant,
}

impl Default for DesignPoint {
    fn default() -> Self {
        let half_pi = 0.5 * std::f64::consts::PI;
        DesignPoint {
            z: 1.0,
            delta: 0.0,
            lambda: 0.1,
            cprime_over_z: 0.1,
            gamma_x: 100e-9,
            phi1: half_pi,
            phi2: half_pi,
            theta12: 0.0,
            splitting1: 2.8,
            lifetime1_ns: 5.0,
            cutoff: 0.3,
            family: SpectralFamily::Gaussian,
            phonon_temperature: 300.0,
            photon_temperature: 6000.0,
            trap_temperature: 300.0,
            coupling_convention: CouplingConvention::Calibrated,
            cross_function: CrossFunctionMode::Limit,
            trap_splitting: TrapSplitting::Dressed,
            voltage: VoltageConvention::Thermodynamic,
            variant: Variant::Rwa,
        }
    }
}

impl DesignPoint {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("z", self.z)?;
        ensure_finite("detuning", self.delta)?;
        ensure_non_negative("reorganization energy", self.lambda)?;
        ensure_positive("C'/z", self.cprime_over_z)?;
        ensure_non_negative("extraction rate", self.gamma_x)?;
        ensure_positive("monomer-1 splitting", self.splitting1)?;
        ensure_positive("monomer-1 lifetime", self.lifetime1_ns)?;
        ensure_positive("cutoff", self.cutoff)?;
        if self.z > 1.0 {
            return Err(Error::invalid(format!(
                "z = {} exceeds 1; monomer 1 must carry the larger dipole",
                self.z
            )));
        }
        if self.delta < 0.0 || self.delta >= self.splitting1 {
            return Err(Error::invalid(format!(
                "detuning {} eV must lie in [0, {}) so that monomer 2 is the lower monomer",
                self.delta, self.splitting1
            )));
        }
        Ok(())
    }

    pub fn bath(&self) -> Result<PhononBath> {
        PhononBath::new(self.family, self.lambda, self.cutoff, self.phonon_temperature)
    }

    /// Separation in nm that holds C′/z fixed at this λ.
    pub fn separation(&self) -> Result<f64> {
        let bath = self.bath()?;
        let d1 = crate::units::lifetime_to_dipole(self.lifetime1_ns, self.splitting1)?;
        let ideal = DipoleGeometry::ideal(1.0)?;
        separation_for_coupling(
            self.cprime_over_z,
            ideal.orientation.beta12,
            d1,
            d1,
            bath.kappa_sq(),
            self.coupling_convention,
        )
    }

    pub fn parameters(&self) -> Result<DimerParameters> {
        self.validate()?;
        let bath = self.bath()?;
        let m1 = Monomer::from_lifetime(self.splitting1, self.lifetime1_ns, bath.clone())?;
        let d2 = self.z * m1.dipole;
        let m2 = Monomer::new(self.splitting1 - self.delta, d2, bath)?;
        let geometry = DipoleGeometry::new(self.phi1, self.phi2, self.theta12, self.separation()?)?;
        Ok(DimerParameters::new([m1, m2], geometry, self.photon_temperature)?
            .with_coupling_convention(self.coupling_convention)
            .with_cross_function(self.cross_function))
    }

    pub fn evaluate(&self) -> Result<SweepRow> {
        let params = self.parameters()?;
        let (p, r) = benchmarked_power(
            &params,
            self.variant,
            self.gamma_x,
            self.trap_temperature,
            self.trap_splitting,
            self.voltage,
        )?;
        let mut flags = Vec::new();
        if p.boundary_warning {
            flags.push("gamma_t-boundary".to_string());
        }
        if p.zero_population {
            flags.push("zero-population".to_string());
        }
        Ok(SweepRow {
            point: *self,
            power_pw: p.power_pw,
            benchmark_pw: p.benchmark_pw.unwrap_or(f64::NAN),
            ratio: p.ratio.unwrap_or(f64::NAN),
            gamma_minus_e: r.big_gamma_minus_e,
            gamma_plus_a: r.big_gamma_plus_a,
            phonon_transfer: r.phonon.net_transfer(),
            nonsecular_freq: nonsecular_frequency(&r),
            gamma_t: p.gamma_t,
            flags,
        })
    }
}

/// Sweep axes; an empty axis keeps the value from `base`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    pub base: DesignPoint,
    pub z: Vec<f64>,
    pub delta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub cprime_over_z: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub theta12: Vec<f64>,
    pub gamma_x: Vec<f64>,
}

impl SweepGrid {
    fn axes(&self) -> [(&[f64], f64); 8] {
        let b = &self.base;
        [
            (&self.lambda, b.lambda),
            (&self.cprime_over_z, b.cprime_over_z),
            (&self.gamma_x, b.gamma_x),
            (&self.phi1, b.phi1),
            (&self.phi2, b.phi2),
            (&self.theta12, b.theta12),
            (&self.delta, b.delta),
            (&self.z, b.z),
        ]
    }

    pub fn len(&self) -> usize {
        self.axes().iter().map(|(a, _)| a.len().max(1)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order; z varies fastest.
    pub fn points(&self) -> Vec<DesignPoint> {
        let axes = self.axes();
        let lens: Vec<usize> = axes.iter().map(|(a, _)| a.len().max(1)).collect();
        (0..self.len())
            .map(|flat| {
                let mut rem = flat;
                let mut vals = [0.0; 8];
                for k in (0..8).rev() {
                    let i = rem % lens[k];
                    rem /= lens[k];
                    vals[k] = if axes[k].0.is_empty() { axes[k].1 } else { axes[k].0[i] };
                }
                DesignPoint {
                    lambda: vals[0],
                    cprime_over_z: vals[1],
                    gamma_x: vals[2],
                    phi1: vals[3],
                    phi2: vals[4],
                    theta12: vals[5],
                    delta: vals[6],
                    z: vals[7],
                    ..self.base
                }
            })
            .collect()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: DesignPoint,
    pub power_pw: f64,
    pub benchmark_pw: f64,
    pub ratio: f64,
    pub gamma_minus_e: f64,
    pub gamma_plus_a: f64,
    pub phonon_transfer: f64,
    pub nonsecular_freq: f64,
    pub gamma_t: f64,
    pub flags: Vec<String>,
}

pub const SWEEP_CSV_HEADER: [&str; 13] = [
    "z",
    "Delta_eV",
    "lambda_eV",
    "Cprime_over_z_eV",
    "gamma_x_eV",
    "power_pW",
    "benchmark_pW",
    "ratio",
    "Gamma_minus_E_eV",
    "Gamma_plus_A_eV",
    "phonon_transfer_eV",
    "nonsecular_freq_eV",
    "flags",
];

impl SweepRow {
    /// Row recording a failed point; the sweep carries on.
    pub fn failed(point: DesignPoint, err: &Error) -> Self {
        SweepRow {
            point,
            power_pw: f64::NAN,
            benchmark_pw: f64::NAN,
            ratio: f64::NAN,
            gamma_minus_e: f64::NAN,
            gamma_plus_a: f64::NAN,
            phonon_transfer: f64::NAN,
            nonsecular_freq: f64::NAN,
            gamma_t: f64::NAN,
            flags: vec![format!("error: {err}")],
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        let p = &self.point;
        let num = |x: f64| format!("{x:.10e}");
        vec![
            num(p.z),
            num(p.delta),
            num(p.lambda),
            num(p.cprime_over_z),
            num(p.gamma_x),
            num(self.power_pw),
            num(self.benchmark_pw),
            num(self.ratio),
            num(self.gamma_minus_e),
            num(self.gamma_plus_a),
            num(self.phonon_transfer),
            num(self.nonsecular_freq),
            self.flags.join(";"),
        ]
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn run_sweep(grid: &SweepGrid) -> Vec<SweepRow> {
    grid.points()
        .into_par_iter()
        .map(|p| p.evaluate().unwrap_or_else(|e| SweepRow::failed(p, &e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trap() -> TrapParameters {
        TrapParameters {
            delta_t: 2.0,
            gamma_x: 1e-7,
            gamma_t: 1e-6,
            temperature: 300.0,
            voltage: VoltageConvention::Thermodynamic,
        }
    }

    #[test]
    fn equal_trap_populations_give_trap_splitting() {
        let p = PowerResult::from_populations(&trap(), 0.5, 0.5);
        assert!((p.voltage - 2.0).abs() < 1e-15);
        assert!((p.current - 5e-7).abs() < 1e-20);
    }

    #[test]
    fn empty_trap_reports_zero_power() {
        let p = PowerResult::from_populations(&trap(), 0.0, 1.0);
        assert!(p.zero_population);
        assert_eq!(p.power_pw, 0.0);
    }

    #[test]
    fn grid_order_and_size() {
        let g = SweepGrid {
            z: vec![0.1, 0.2, 0.3],
            delta: vec![0.0, 0.5],
            ..Default::default()
        };
        assert_eq!(g.len(), 6);
        let pts = g.points();
        assert_eq!(pts[0].z, 0.1);
        assert_eq!(pts[1].z, 0.2);
        assert_eq!(pts[3].delta, 0.5);
        assert_eq!(pts[5].z, 0.3);
    }

    #[test]
    fn design_point_rejects_inverted_monomers() {
        let p = DesignPoint {
            z: 1.5,
            ..Default::default()
        };
        assert!(p.parameters().is_err());
        let p = DesignPoint {
            delta: -0.1,
            ..Default::default()
        };
        assert!(p.parameters().is_err());
    }
}
