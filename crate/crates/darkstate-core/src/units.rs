//! Natural units (ħ = c = 1) with energies in eV.
//!
//! Times are in eV⁻¹, rates in eV, dipoles in e·nm and lengths in nm at the
//! public boundary. Vacuum permittivity is folded into the dipole conversion
//! (Heaviside-Lorentz), so a dipole `d` in e·nm maps to
//! `d² = 4πα d̃² / (ħc)²` in eV⁻².

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// ħ in eV·s.
pub const HBAR_EV_S: f64 = 6.582119569e-16;
/// Boltzmann constant in eV/K.
pub const KB_EV_PER_K: f64 = 8.617333e-5;
/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.3269804;
/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035999084;
/// Elementary charge in C.
pub const ELEMENTARY_CHARGE_C: f64 = 1.602176634e-19;
/// e²/(4πε₀) in eV·nm.
pub const COULOMB_EV_NM: f64 = FINE_STRUCTURE * HBAR_C_EV_NM;

/// Unit bookkeeping shared by every module.
///
/// All fields are constants; the struct exists so configs and artifact
/// headers can record which constants were used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar_ev_s: f64,
    pub kb_ev_per_k: f64,
    pub hbar_c_ev_nm: f64,
    pub fine_structure: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hbar_ev_s: HBAR_EV_S,
            kb_ev_per_k: KB_EV_PER_K,
            hbar_c_ev_nm: HBAR_C_EV_NM,
            fine_structure: FINE_STRUCTURE,
        }
    }
}

/// Nanoseconds to eV⁻¹.
pub fn ns_to_inv_ev(t_ns: f64) -> f64 {
    t_ns * 1e-9 / HBAR_EV_S
}

/// eV⁻¹ to nanoseconds.
pub fn inv_ev_to_ns(t: f64) -> f64 {
    t * HBAR_EV_S * 1e9
}

/// Length in nm to eV⁻¹.
pub fn nm_to_inv_ev(r_nm: f64) -> f64 {
    r_nm / HBAR_C_EV_NM
}

/// Squared dipole in eV⁻² from a dipole in e·nm.
pub fn dipole_sq_natural(d_enm: f64) -> f64 {
    4.0 * PI * FINE_STRUCTURE * d_enm * d_enm / (HBAR_C_EV_NM * HBAR_C_EV_NM)
}

/// Inverse temperature in eV⁻¹. Zero temperature maps to infinity.
pub fn inverse_temperature(t_kelvin: f64) -> f64 {
    if t_kelvin <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / (KB_EV_PER_K * t_kelvin)
    }
}

/// Bose-Einstein occupation at energy `omega` (eV) and temperature in K.
pub fn bose(omega: f64, t_kelvin: f64) -> f64 {
    let beta = inverse_temperature(t_kelvin);
    if !beta.is_finite() {
        return 0.0;
    }
    1.0 / (beta * omega).exp_m1()
}

/// Bare spontaneous rate d²ω³/(3π) in eV for a dipole in e·nm.
pub fn bare_rate(d_enm: f64, omega: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    dipole_sq_natural(d_enm) * omega.powi(3) / (3.0 * PI)
}

/// Dipole (e·nm) whose bare rate at `omega` equals 1/τ.
pub fn lifetime_to_dipole(tau_ns: f64, omega: f64) -> Result<f64> {
    ensure_positive("lifetime", tau_ns)?;
    ensure_positive("transition energy", omega)?;
    let gamma = 1.0 / ns_to_inv_ev(tau_ns);
    let d_sq_nat = 3.0 * PI * gamma / omega.powi(3);
    Ok((d_sq_nat / dipole_sq_natural(1.0)).sqrt())
}

/// Inverse of [`lifetime_to_dipole`]. Returns the lifetime in ns.
pub fn dipole_to_lifetime(d_enm: f64, omega: f64) -> Result<f64> {
    ensure_positive("dipole", d_enm)?;
    ensure_positive("transition energy", omega)?;
    Ok(inv_ev_to_ns(1.0 / bare_rate(d_enm, omega)))
}

/// Converts a power in eV² (eV of voltage times eV of rate) to picowatts.
pub fn power_ev2_to_pw(p: f64) -> f64 {
    p * ELEMENTARY_CHARGE_C / HBAR_EV_S * 1e12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ns_round_trip() {
        for t in [1e-3, 0.5, 5.0, 1e6] {
            let back = inv_ev_to_ns(ns_to_inv_ev(t));
            assert!(((back - t) / t).abs() < 1e-12);
        }
    }

    #[test]
    fn five_ns_anchor() {
        let d = lifetime_to_dipole(5.0, 2.8).unwrap();
        assert!((d - 0.15).abs() / 0.15 < 0.05, "d = {d}");
    }

    #[test]
    fn dipole_scales_with_three_halves_power() {
        let a = lifetime_to_dipole(5.0, 2.8).unwrap();
        let b = lifetime_to_dipole(5.0, 1.4).unwrap();
        assert!((b / a - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn long_lifetime_gives_small_dipole() {
        assert!(lifetime_to_dipole(1e12, 2.8).unwrap() < 1e-6);
    }

    #[test]
    fn lifetime_round_trip() {
        let d = lifetime_to_dipole(3.7, 2.1).unwrap();
        let t = dipole_to_lifetime(d, 2.1).unwrap();
        assert!((t - 3.7).abs() / 3.7 < 1e-10);
    }

    #[test]
    fn bose_limits() {
        assert_eq!(bose(1.0, 0.0), 0.0);
        let n = bose(2.8, 6000.0);
        assert!(n > 0.0 && n < 1e-2);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(lifetime_to_dipole(0.0, 2.8).is_err());
        assert!(lifetime_to_dipole(5.0, -1.0).is_err());
    }
}
