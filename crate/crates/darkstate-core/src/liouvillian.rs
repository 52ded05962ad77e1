//! Photon and phonon generators on ρ = (ρ₀₀, ρ₊₊, ρ₋₋, ρ₊₋, ρ₋₊), the
//! dimer ⊗ trap composite, steady states and time evolution.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::rates::RateSet;
use crate::special::Variant;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// Index of each dimer component in the 5-vector.
pub mod idx {
    pub const G: usize = 0;
    pub const PP: usize = 1;
    pub const MM: usize = 2;
    pub const PM: usize = 3;
    pub const MP: usize = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// (ρ₀₀, ρ₊₊, ρ₋₋, ρ₊₋, ρ₋₊)
    Dimer,
    /// The dimer 5-vector within trap level α, then within trap level β.
    DimerTrap,
}

impl Basis {
    pub fn dim(self) -> usize {
        match self {
            Basis::Dimer => 5,
            Basis::DimerTrap => 10,
        }
    }

    pub fn population_indices(self) -> &'static [usize] {
        match self {
            Basis::Dimer => &[0, 1, 2],
            Basis::DimerTrap => &[0, 1, 2, 5, 6, 7],
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Basis::Dimer => &["00", "++", "--", "+-", "-+"],
            Basis::DimerTrap => &[
                "00,a", "++,a", "--,a", "+-,a", "-+,a", "00,b", "++,b", "--,b", "+-,b", "-+,b",
            ],
        }
    }
}

/// Dense generator with a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: DMatrix<C>,
    pub basis: Basis,
}

impl Liouvillian {
    pub fn zeros(basis: Basis) -> Self {
        Liouvillian {
            matrix: DMatrix::zeros(basis.dim(), basis.dim()),
            basis,
        }
    }

    /// Largest column sum over population rows, relative to the matrix norm.
    pub fn trace_defect(&self) -> f64 {
        let norm = self.matrix.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        let pops = self.basis.population_indices();
        (0..self.matrix.ncols())
            .map(|j| pops.iter().map(|&i| self.matrix[(i, j)]).sum::<C>().norm())
            .fold(0.0, f64::max)
            / norm
    }
}

impl std::ops::Add for Liouvillian {
    type Output = Liouvillian;
    fn add(self, rhs: Liouvillian) -> Liouvillian {
        assert_eq!(self.basis, rhs.basis, "basis mismatch");
        Liouvillian {
            matrix: self.matrix + rhs.matrix,
            basis: self.basis,
        }
    }
}

/// Photon-plus-system generator.
///
/// Under the non-RWA variant the virtual couplings enter as Φ̃± = iφ̃±,
/// i.e. as coherent shifts like the iS₊₋ parts of Θ±. The ground-state row
/// absorbs the resulting column imbalance, the same way the RWA matrix
/// balances S₊₋(δ₊) against S₊₋(δ₋).
pub fn build_photon_liouvillian(r: &RateSet, variant: Variant) -> Liouvillian {
    use idx::*;
    let mut l = Liouvillian::zeros(Basis::Dimer);
    let m = &mut l.matrix;
    let (tp, tm) = (r.theta_plus, r.theta_minus);
    let (ttp, ttm) = (r.theta_tilde_plus, r.theta_tilde_minus);
    let (pp, pm, dtilde) = match variant {
        Variant::Rwa => (ZERO, ZERO, r.delta_tilde_plus - r.delta_tilde_minus),
        Variant::NonRwa => (
            I * r.phi_tilde[0],
            I * r.phi_tilde[1],
            r.delta_tilde_plus_f - r.delta_tilde_minus_f,
        ),
    };
    let decay = -0.5 * (r.gamma_plus_e + r.gamma_minus_e);

    m[(G, G)] = re(-(r.gamma_plus_a + r.gamma_minus_a));
    m[(G, PP)] = re(r.gamma_plus_e);
    m[(G, MM)] = re(r.gamma_minus_e);
    m[(G, PM)] = tp + tm.conj() + pp.conj() + pm;
    m[(G, MP)] = tp.conj() + tm + pp + pm.conj();

    m[(PP, G)] = re(r.gamma_plus_a);
    m[(PP, PP)] = re(-r.gamma_plus_e);
    m[(PP, PM)] = -tm.conj() - pp.conj();
    m[(PP, MP)] = -tm - pp;

    m[(MM, G)] = re(r.gamma_minus_a);
    m[(MM, MM)] = re(-r.gamma_minus_e);
    m[(MM, PM)] = -tp - pm;
    m[(MM, MP)] = -tp.conj() - pm.conj();

    m[(PM, G)] = ttp + ttm.conj();
    m[(PM, PP)] = -tp.conj() - pm.conj();
    m[(PM, MM)] = -tm - pp;
    m[(PM, PM)] = C::new(decay, -dtilde);

    m[(MP, G)] = ttp.conj() + ttm;
    m[(MP, PP)] = -tp - pm;
    m[(MP, MM)] = -tm.conj() - pp.conj();
    m[(MP, MP)] = C::new(decay, dtilde);
    l
}

/// Phonon generator in the eigenbasis.
pub fn build_phonon_liouvillian(r: &RateSet) -> Liouvillian {
    use idx::*;
    let p = &r.phonon;
    let mut l = Liouvillian::zeros(Basis::Dimer);
    let m = &mut l.matrix;
    m[(PP, PP)] = re(-p.gamma_plus_down);
    m[(PP, MM)] = re(p.gamma_plus_up);
    m[(MM, PP)] = re(p.gamma_plus_down);
    m[(MM, MM)] = re(-p.gamma_plus_up);

    m[(PP, PM)] = re(p.gamma_xz0);
    m[(PP, MP)] = re(p.gamma_xz0);
    m[(MM, PM)] = re(-p.gamma_xz0);
    m[(MM, MP)] = re(-p.gamma_xz0);

    let is = I * p.s_xz0;
    m[(PM, PP)] = 2.0 * (is + p.zeta_xz_eta.conj());
    m[(PM, MM)] = 2.0 * (is - p.zeta_xz_neg_eta);
    m[(MP, PP)] = 2.0 * (-is + p.zeta_xz_eta);
    m[(MP, MM)] = 2.0 * (-is - p.zeta_xz_neg_eta.conj());

    m[(PM, PM)] = C::new(-p.gamma_bar_plus - 2.0 * p.gamma_zz0, -p.mu_bar_plus);
    m[(PM, MP)] = C::new(p.gamma_bar_minus, -p.mu_bar_minus);
    m[(MP, PM)] = C::new(p.gamma_bar_minus, p.mu_bar_minus);
    m[(MP, MP)] = C::new(-p.gamma_bar_plus - 2.0 * p.gamma_zz0, p.mu_bar_plus);
    l
}

/// Photon plus phonon generator for the isolated dimer.
pub fn build_total_liouvillian(r: &RateSet, variant: Variant) -> Liouvillian {
    build_photon_liouvillian(r, variant) + build_phonon_liouvillian(r)
}

/// Two-level trap attached to |−⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParameters {
    /// Trap splitting δ_t (eV).
    pub delta_t: f64,
    /// Extraction rate γ_x (eV).
    pub gamma_x: f64,
    /// Trap decay rate γ_t (eV).
    pub gamma_t: f64,
    /// Trap temperature (K).
    pub temperature: f64,
    #[serde(default)]
    pub voltage: VoltageConvention,
}

/// Sign of the entropic term in the trap voltage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoltageConvention {
    /// V = δ_t + kT ln(P_α/P_β): the voltage falls below δ_t as the trap
    /// empties, so the power has an interior maximum in γ_t.
    #[default]
    Thermodynamic,
    /// V = δ_t − kT ln(P_α/P_β), which grows without bound as γ_t → ∞.
    Reversed,
}

impl VoltageConvention {
    pub fn sign(self) -> f64 {
        match self {
            VoltageConvention::Thermodynamic => 1.0,
            VoltageConvention::Reversed => -1.0,
        }
    }
}

impl TrapParameters {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("trap splitting", self.delta_t)?;
        ensure_non_negative("extraction rate", self.gamma_x)?;
        ensure_non_negative("trap decay rate", self.gamma_t)?;
        ensure_non_negative("trap temperature", self.temperature)
    }
}

/// Dimer generator acting within each trap level, plus extraction
/// |0,α⟩⟨−,β| at γ_x and trap decay α → β at γ_t.
pub fn compose_with_trap(dimer: &Liouvillian, trap: &TrapParameters) -> Result<Liouvillian> {
    if dimer.basis != Basis::Dimer {
        return Err(Error::invalid("trap composition needs a dimer generator"));
    }
    trap.validate()?;
    let mut l = Liouvillian::zeros(Basis::DimerTrap);
    let m = &mut l.matrix;
    for block in 0..2 {
        let o = 5 * block;
        for i in 0..5 {
            for j in 0..5 {
                m[(o + i, o + j)] += dimer.matrix[(i, j)];
            }
        }
    }
    let (a, b) = (0usize, 5usize);
    for k in 0..5 {
        m[(a + k, a + k)] -= re(trap.gamma_t);
        m[(b + k, a + k)] += re(trap.gamma_t);
    }
    m[(a + idx::G, b + idx::MM)] += re(trap.gamma_x);
    m[(b + idx::MM, b + idx::MM)] -= re(trap.gamma_x);
    m[(b + idx::PM, b + idx::PM)] -= re(0.5 * trap.gamma_x);
    m[(b + idx::MP, b + idx::MP)] -= re(0.5 * trap.gamma_x);
    Ok(l)
}

/// Density vector in a labelled basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityVector {
    pub basis: Basis,
    pub components: Vec<C>,
}

impl DensityVector {
    pub fn new(basis: Basis, components: Vec<C>) -> Result<Self> {
        if components.len() != basis.dim() {
            return Err(Error::invalid(format!(
                "expected {} components, got {}",
                basis.dim(),
                components.len()
            )));
        }
        Ok(DensityVector { basis, components })
    }

    /// The dimer ground state, with the trap (if any) in level β.
    pub fn ground(basis: Basis) -> Self {
        let mut c = vec![ZERO; basis.dim()];
        let slot = match basis {
            Basis::Dimer => idx::G,
            Basis::DimerTrap => 5 + idx::G,
        };
        c[slot] = re(1.0);
        DensityVector { basis, components: c }
    }

    pub fn trace(&self) -> C {
        self.basis
            .population_indices()
            .iter()
            .map(|&i| self.components[i])
            .sum()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.components[i].re
    }

    /// Trap populations (P_α, P_β); `None` for a bare dimer vector.
    pub fn trap_populations(&self) -> Option<(f64, f64)> {
        match self.basis {
            Basis::Dimer => None,
            Basis::DimerTrap => {
                let pa = (0..3).map(|i| self.components[i].re).sum();
                let pb = (5..8).map(|i| self.components[i].re).sum();
                Some((pa, pb))
            }
        }
    }

    fn as_vector(&self) -> DVector<C> {
        DVector::from_vec(self.components.clone())
    }
}

/// Rank tolerance on singular values, relative to the largest.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Unique trace-one kernel vector of `l`.
///
/// The kernel dimension is checked by SVD; the vector itself comes from a
/// trace-constrained LU solve with two rounds of iterative refinement, which
/// keeps small populations accurate when rates span many decades.
pub fn steady_state(l: &Liouvillian) -> Result<DensityVector> {
    let n = l.matrix.nrows();
    let svd = l.matrix.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let smax = sv[0];
    if !(smax > 0.0) || !smax.is_finite() {
        return Err(Error::Numerical("generator is zero or non-finite".into()));
    }
    let second = sv[n - 2];
    if second <= RANK_TOLERANCE * smax {
        return Err(Error::DegenerateSteadyState { sigma: second / smax });
    }

    let pops = l.basis.population_indices();
    let mut a = l.matrix.clone();
    let row = pops[0];
    for j in 0..n {
        a[(row, j)] = ZERO;
    }
    for &p in pops {
        a[(row, p)] = re(1.0);
    }
    let mut b = DVector::<C>::zeros(n);
    b[row] = re(1.0);
    let lu = a.clone().lu();
    let mut x = lu
        .solve(&b)
        .ok_or_else(|| Error::Numerical("steady-state solve is singular".into()))?;
    for _ in 0..2 {
        let r = &a * &x - &b;
        if let Some(dx) = lu.solve(&r) {
            x -= dx;
        }
    }
    // Enforce the conjugate structure exactly.
    let mut comps: Vec<C> = x.iter().copied().collect();
    for &p in pops {
        comps[p] = re(comps[p].re);
    }
    for block in 0..n / 5 {
        let (i, j) = (5 * block + idx::PM, 5 * block + idx::MP);
        let avg = 0.5 * (comps[i] + comps[j].conj());
        comps[i] = avg;
        comps[j] = avg.conj();
    }
    for &p in pops {
        if comps[p].re < -1e-8 {
            return Err(Error::NegativePopulation {
                index: p,
                value: comps[p].re,
            });
        }
    }
    DensityVector::new(l.basis, comps)
}

/// ρ(t) = exp(Lt)ρ₀ on each grid time.
///
/// Uses the Padé scaling-and-squaring exponential; equal steps reuse one
/// propagator.
pub fn time_evolve(l: &Liouvillian, rho0: &DensityVector, t_grid: &[f64]) -> Result<Vec<DensityVector>> {
    if rho0.basis != l.basis {
        return Err(Error::invalid("initial state basis does not match generator"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid must be ascending"));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let mut current = rho0.as_vector();
    let mut last_t = 0.0;
    let mut cached: Option<(f64, DMatrix<C>)> = None;
    for &t in t_grid {
        let dt = t - last_t;
        if dt != 0.0 {
            let reuse = matches!(&cached, Some((h, _)) if ((h - dt) / dt).abs() < 1e-12);
            if !reuse {
                cached = Some((dt, (&l.matrix * re(dt)).exp()));
            }
            let (_, prop) = cached.as_ref().expect("propagator");
            current = prop * &current;
        }
        if current.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("time evolution produced non-finite values".into()));
        }
        out.push(DensityVector {
            basis: l.basis,
            components: current.iter().copied().collect(),
        });
        last_t = t;
    }
    Ok(out)
}

/// Generator of the optical coherences (ρ₊₀, ρ₋₀) used by the regression
/// theorem.
///
/// These elements sit outside the 5-vector. Diagonal entries collect the
/// dressed transition frequencies (with the phonon detuning shift split
/// symmetrically), half the excited-state decay, half the ground-state
/// absorption and half the phonon transfer and pure dephasing; the
/// off-diagonal entries are the photon cross terms −Θ∓.
pub fn optical_coherence_generator(r: &RateSet) -> Matrix2<C> {
    let p = &r.phonon;
    let ground = 0.5 * (r.gamma_plus_a + r.gamma_minus_a);
    let plus = C::new(
        -0.5 * r.gamma_plus_e - ground - 0.5 * p.gamma_plus_down - 0.5 * p.gamma_zz0,
        -(r.delta_tilde_plus + 0.5 * p.mu_bar_plus),
    );
    let minus = C::new(
        -0.5 * r.gamma_minus_e - ground - 0.5 * p.gamma_plus_up - 0.5 * p.gamma_zz0,
        -(r.delta_tilde_minus - 0.5 * p.mu_bar_plus),
    );
    Matrix2::new(plus, -r.theta_minus, -r.theta_plus, minus)
}
