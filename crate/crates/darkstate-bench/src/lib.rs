//! Fixtures shared by the benchmarks.

use darkstate_core::{DesignPoint, DimerParameters};

/// Ideal-orientation homodimer at the emission minimum, λ = 100 meV.
pub fn homodimer() -> DimerParameters {
    DesignPoint {
        z: 0.735,
        ..Default::default()
    }
    .parameters()
    .expect("valid fixture")
}

/// Strongly detuned dimer with a weak second dipole.
pub fn heterodimer() -> DimerParameters {
    DesignPoint {
        z: 0.01,
        delta: 0.2,
        ..Default::default()
    }
    .parameters()
    .expect("valid fixture")
}
