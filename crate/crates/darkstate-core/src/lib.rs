//! Dark-state formation and power extraction in a dipole-coupled molecular
//! dimer with strong vibrational coupling, treated in the polaron frame.
//!
//! The crate is organized bottom-up:
//!
//! - [`units`] and [`geometry`]: natural units, dipole orientation, static coupling.
//! - [`special`]: Si/Ci, the cross function F and the generating function 𝒢.
//! - [`phonon`]: spectral densities, propagators, ζ renormalization, phonon ECFs.
//! - [`rates`]: eigenstructure and every rate coefficient the generators need.
//! - [`liouvillian`]: photon and phonon generators, trap composition, steady states.
//! - [`spectra`]: absorption/emission spectra and sideband diagnostics.
//! - [`power`]: trap power, the independent-monomer benchmark and sweeps.

pub mod error;
pub mod geometry;
pub mod liouvillian;
pub mod phonon;
pub mod power;
pub mod quad;
pub mod rates;
pub mod special;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use geometry::{CouplingConvention, DipoleGeometry, OrientationFactors};
pub use liouvillian::{DensityVector, Liouvillian, TrapParameters, VoltageConvention};
pub use phonon::{EcfPair, PhononBath, PhotonSpectralFunction, Process, SpectralFamily};
pub use power::{DesignPoint, PowerResult, SweepGrid, SweepRow, TrapSplitting};
pub use rates::{CrossFunctionMode, DimerParameters, EigenSystem, Monomer, RateSet};
pub use special::Variant;
pub use spectra::{DimerSpectra, SidebandDiagnostics, SpectralModel, Spectrum};
pub use units::UnitSystem;
