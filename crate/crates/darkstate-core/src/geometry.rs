//! Dipole orientation and static dipole-dipole coupling.
//!
//! The separation vector is the polar axis. Each transition dipole has a
//! polar angle `phi_j` from that axis and an azimuth; only the relative
//! azimuth `theta12` matters, so dipole 2 sits at zero azimuth.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};
use crate::units::COULOMB_EV_NM;

/// Orientation scalars α₁₂ and β₁₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientationFactors {
    pub alpha12: f64,
    pub beta12: f64,
}

impl OrientationFactors {
    pub const IDEAL: OrientationFactors = OrientationFactors {
        alpha12: 1.0,
        beta12: 1.0,
    };

    /// d̂₁·d̂₂, which is also the x → 0 limit of the cross function.
    pub fn dot(&self) -> f64 {
        0.5 * (3.0 * self.alpha12 - self.beta12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleGeometry {
    pub phi1: f64,
    pub phi2: f64,
    pub theta12: f64,
    /// Separation in nm.
    pub r12: f64,
    pub d1_hat: [f64; 3],
    pub d2_hat: [f64; 3],
    pub r_hat: [f64; 3],
    pub orientation: OrientationFactors,
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit_vector(phi: f64, theta: f64) -> [f64; 3] {
    [phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()]
}

impl DipoleGeometry {
    pub fn new(phi1: f64, phi2: f64, theta12: f64, r12: f64) -> Result<Self> {
        ensure_finite("phi1", phi1)?;
        ensure_finite("phi2", phi2)?;
        ensure_finite("theta12", theta12)?;
        ensure_positive("r12", r12)?;
        let d1_hat = unit_vector(phi1, theta12);
        let d2_hat = unit_vector(phi2, 0.0);
        let r_hat = [0.0, 0.0, 1.0];
        let orientation = orientation_factors(&d1_hat, &d2_hat, &r_hat);
        Ok(DipoleGeometry {
            phi1,
            phi2,
            theta12,
            r12,
            d1_hat,
            d2_hat,
            r_hat,
            orientation,
        })
    }

    /// Parallel dipoles perpendicular to the separation (F = 1).
    pub fn ideal(r12: f64) -> Result<Self> {
        Self::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 0.0, r12)
    }

    pub fn with_separation(&self, r12: f64) -> Result<Self> {
        Self::new(self.phi1, self.phi2, self.theta12, r12)
    }
}

pub fn build_geometry(phi1: f64, phi2: f64, theta12: f64, r12: f64) -> Result<DipoleGeometry> {
    DipoleGeometry::new(phi1, phi2, theta12, r12)
}

/// α₁₂ = d̂₁·d̂₂ − (d̂₁·r̂)(d̂₂·r̂), β₁₂ = d̂₁·d̂₂ − 3(d̂₁·r̂)(d̂₂·r̂).
pub fn orientation_factors(d1: &[f64; 3], d2: &[f64; 3], r: &[f64; 3]) -> OrientationFactors {
    let dd = dot3(d1, d2);
    let proj = dot3(d1, r) * dot3(d2, r);
    OrientationFactors {
        alpha12: dd - proj,
        beta12: dd - 3.0 * proj,
    }
}

/// Normalization of the static dipole coupling.
///
/// `Literal` takes C/2 = β d₁d₂/(4πr³). `Calibrated` drops the factor 2,
/// C = β d₁d₂/(4πr³), so that C′/z = 100 meV at λ = 100 meV needs a
/// separation of about 0.61 nm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingConvention {
    #[default]
    Calibrated,
    Literal,
}

impl CouplingConvention {
    fn prefactor(self) -> f64 {
        match self {
            CouplingConvention::Calibrated => 1.0,
            CouplingConvention::Literal => 2.0,
        }
    }
}

/// Static coupling C in eV for dipoles in e·nm.
pub fn dipole_dipole_coupling(geom: &DipoleGeometry, d1: f64, d2: f64, convention: CouplingConvention) -> Result<f64> {
    ensure_non_negative("d1", d1)?;
    ensure_non_negative("d2", d2)?;
    if geom.r12 <= 0.0 {
        return Err(Error::invalid("coupling is singular at zero separation"));
    }
    Ok(convention.prefactor() * geom.orientation.beta12 * COULOMB_EV_NM * d1 * d2 / geom.r12.powi(3))
}

/// Separation (nm) at which `scale · C(r) = target` for the given β₁₂.
///
/// `scale` is typically κ₁κ₂ so that the renormalized coupling hits the
/// target.
pub fn separation_for_coupling(
    target: f64,
    beta12: f64,
    d1: f64,
    d2: f64,
    scale: f64,
    convention: CouplingConvention,
) -> Result<f64> {
    ensure_positive("target coupling", target.abs())?;
    let numerator = scale * convention.prefactor() * beta12 * COULOMB_EV_NM * d1 * d2;
    let cube = numerator / target;
    if !(cube > 0.0) {
        return Err(Error::invalid(format!(
            "no separation gives coupling {target} eV with beta12 = {beta12}"
        )));
    }
    Ok(cube.cbrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ideal_geometry_factors() {
        let g = DipoleGeometry::ideal(1.0).unwrap();
        assert!((g.orientation.alpha12 - 1.0).abs() < 1e-15);
        assert!((g.orientation.beta12 - 1.0).abs() < 1e-15);
        assert!((g.orientation.dot() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perpendicular_azimuth_kills_coupling() {
        for theta in [PI / 2.0, 1.5 * PI] {
            let g = DipoleGeometry::new(PI / 2.0, PI / 2.0, theta, 1.0).unwrap();
            assert!(g.orientation.alpha12.abs() < 1e-15);
            assert!(g.orientation.beta12.abs() < 1e-15);
            let c = dipole_dipole_coupling(&g, 0.15, 0.15, CouplingConvention::Calibrated).unwrap();
            assert!(c.abs() < 1e-15);
        }
    }

    #[test]
    fn generic_angles_match_vector_arithmetic() {
        let (p1, p2, t) = (0.6 * PI, 0.3 * PI, 0.2 * PI);
        let g = DipoleGeometry::new(p1, p2, t, 1.0).unwrap();
        // d1·d2 = sin p1 sin p2 cos t + cos p1 cos p2; projections are cosines.
        let dd = p1.sin() * p2.sin() * t.cos() + p1.cos() * p2.cos();
        let proj = p1.cos() * p2.cos();
        assert!((g.orientation.alpha12 - (dd - proj)).abs() < 1e-14);
        assert!((g.orientation.beta12 - (dd - 3.0 * proj)).abs() < 1e-14);
    }

    #[test]
    fn unit_vectors_are_normalized() {
        let g = DipoleGeometry::new(0.37, 2.2, -1.1, 0.8).unwrap();
        for v in [g.d1_hat, g.d2_hat, g.r_hat] {
            assert!((dot3(&v, &v).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_scales_as_inverse_cube() {
        let c = |r: f64| {
            let g = DipoleGeometry::ideal(r).unwrap();
            dipole_dipole_coupling(&g, 0.15, 0.11, CouplingConvention::Calibrated).unwrap()
        };
        for r in [0.5, 1.3, 2.9] {
            assert!((c(r) * r.powi(3) - c(1.0)).abs() / c(1.0) < 1e-12);
        }
    }

    #[test]
    fn literal_convention_is_twice_calibrated() {
        let g = DipoleGeometry::ideal(0.7).unwrap();
        let a = dipole_dipole_coupling(&g, 0.15, 0.15, CouplingConvention::Calibrated).unwrap();
        let b = dipole_dipole_coupling(&g, 0.15, 0.15, CouplingConvention::Literal).unwrap();
        assert!((b / a - 2.0).abs() < 1e-14);
    }

    #[test]
    fn label_swap_symmetry() {
        let a = DipoleGeometry::new(0.4, 1.9, 0.7, 1.0).unwrap();
        let b = DipoleGeometry::new(1.9, 0.4, -0.7, 1.0).unwrap();
        assert!((a.orientation.alpha12 - b.orientation.alpha12).abs() < 1e-14);
        assert!((a.orientation.beta12 - b.orientation.beta12).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(DipoleGeometry::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert!(DipoleGeometry::new(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn separation_inverts_coupling() {
        let r = separation_for_coupling(0.05, 1.0, 0.15, 0.12, 0.7, CouplingConvention::Calibrated).unwrap();
        let g = DipoleGeometry::ideal(r).unwrap();
        let c = dipole_dipole_coupling(&g, 0.15, 0.12, CouplingConvention::Calibrated).unwrap();
        assert!((0.7 * c - 0.05).abs() < 1e-14);
    }
}
