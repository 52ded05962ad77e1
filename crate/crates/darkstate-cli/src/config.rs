//! Run configuration: TOML on disk (JSON accepted as a mirror), resolved to
//! core types with every default filled in.

use std::path::Path;

use darkstate_core::{
    CouplingConvention, CrossFunctionMode, DesignPoint, SpectralFamily, SweepGrid, TrapSplitting, Variant,
    VoltageConvention,
};
use serde::{Deserialize, Serialize};

use crate::units::{Angle, Energy, Temperature, Time};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Rates,
    Spectrum,
    Power,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceProfile {
    Fast,
    #[default]
    Accurate,
}

impl ToleranceProfile {
    pub fn spectrum_points(self) -> usize {
        match self {
            ToleranceProfile::Fast => 1000,
            ToleranceProfile::Accurate => darkstate_core::spectra::DEFAULT_SPECTRUM_POINTS,
        }
    }

    /// Grid used for sideband fractions in the validation suite.
    pub fn fraction_points(self) -> usize {
        match self {
            ToleranceProfile::Fast => 1501,
            ToleranceProfile::Accurate => 4001,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub task: Option<Task>,
    pub variant: Option<Variant>,
    #[serde(default)]
    pub dimer: RawDimer,
    #[serde(default)]
    pub orientation: RawOrientation,
    #[serde(default)]
    pub phonons: RawPhonons,
    #[serde(default)]
    pub photons: RawPhotons,
    #[serde(default)]
    pub trap: RawTrap,
    #[serde(default)]
    pub spectrum: RawSpectrum,
    #[serde(default)]
    pub numerics: RawNumerics,
    pub sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDimer {
    pub splitting1: Option<Energy>,
    pub lifetime1: Option<Time>,
    pub z: Option<f64>,
    pub detuning: Option<Energy>,
    pub cprime_over_z: Option<Energy>,
    pub coupling_convention: Option<CouplingConvention>,
    pub cross_function: Option<CrossFunctionMode>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOrientation {
    pub phi1: Option<Angle>,
    pub phi2: Option<Angle>,
    pub theta12: Option<Angle>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPhonons {
    pub family: Option<SpectralFamily>,
    pub reorganization: Option<Energy>,
    pub cutoff: Option<Energy>,
    pub temperature: Option<Temperature>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPhotons {
    pub temperature: Option<Temperature>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTrap {
    pub extraction: Option<Energy>,
    pub temperature: Option<Temperature>,
    pub splitting: Option<TrapSplitting>,
    pub voltage: Option<VoltageConvention>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpectrum {
    pub points: Option<usize>,
    pub window: Option<[Energy; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNumerics {
    pub profile: Option<ToleranceProfile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Either explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis<T> {
    List(Vec<T>),
    Range(RangeSpec<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec<T> {
    pub from: T,
    pub to: T,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub z: Option<Axis<f64>>,
    pub detuning: Option<Axis<Energy>>,
    pub reorganization: Option<Axis<Energy>>,
    pub cprime_over_z: Option<Axis<Energy>>,
    pub extraction: Option<Axis<Energy>>,
    pub phi1: Option<Axis<Angle>>,
    pub phi2: Option<Axis<Angle>>,
    pub theta12: Option<Axis<Angle>>,
}

trait Scalar {
    fn value(&self) -> f64;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
}

impl<D> Scalar for crate::units::Quantity<D> {
    fn value(&self) -> f64 {
        self.value
    }
}

fn expand<T: Scalar>(name: &str, axis: &Option<Axis<T>>) -> Result<Vec<f64>, CliError> {
    let Some(axis) = axis else { return Ok(Vec::new()) };
    let values = match axis {
        Axis::List(v) => v.iter().map(Scalar::value).collect(),
        Axis::Range(r) => {
            let (a, b) = (r.from.value(), r.to.value());
            if r.count == 0 {
                return Err(CliError::validation(format!("sweep.{name}: count must be positive")));
            }
            if r.count == 1 {
                vec![a]
            } else {
                let step = |i: usize| i as f64 / (r.count - 1) as f64;
                match r.spacing {
                    Spacing::Linear => (0..r.count).map(|i| a + (b - a) * step(i)).collect(),
                    Spacing::Log => {
                        if !(a > 0.0 && b > 0.0) {
                            return Err(CliError::validation(format!(
                                "sweep.{name}: log spacing needs positive end points"
                            )));
                        }
                        (0..r.count).map(|i| a * (b / a).powf(step(i))).collect()
                    }
                }
            }
        }
    };
    if values.is_empty() {
        return Err(CliError::validation(format!("sweep.{name}: empty axis")));
    }
    Ok(values)
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: Option<Task>,
    pub point: DesignPoint,
    pub spectrum_points: usize,
    pub spectrum_window: Option<[f64; 2]>,
    pub profile: ToleranceProfile,
    pub sweep: Option<SweepGrid>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::validation(format!("config: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::validation(format!("config: {e}")))
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let d = DesignPoint::default();
        let point = DesignPoint {
            z: self.dimer.z.unwrap_or(d.z),
            delta: self.dimer.detuning.map_or(d.delta, |q| q.value),
            lambda: self.phonons.reorganization.map_or(d.lambda, |q| q.value),
            cprime_over_z: self.dimer.cprime_over_z.map_or(d.cprime_over_z, |q| q.value),
            gamma_x: self.trap.extraction.map_or(d.gamma_x, |q| q.value),
            phi1: self.orientation.phi1.map_or(d.phi1, |q| q.value),
            phi2: self.orientation.phi2.map_or(d.phi2, |q| q.value),
            theta12: self.orientation.theta12.map_or(d.theta12, |q| q.value),
            splitting1: self.dimer.splitting1.map_or(d.splitting1, |q| q.value),
            lifetime1_ns: self.dimer.lifetime1.map_or(d.lifetime1_ns, |q| q.value),
            cutoff: self.phonons.cutoff.map_or(d.cutoff, |q| q.value),
            family: self.phonons.family.unwrap_or(d.family),
            phonon_temperature: self.phonons.temperature.map_or(d.phonon_temperature, |q| q.value),
            photon_temperature: self.photons.temperature.map_or(d.photon_temperature, |q| q.value),
            trap_temperature: self.trap.temperature.map_or(d.trap_temperature, |q| q.value),
            coupling_convention: self.dimer.coupling_convention.unwrap_or(d.coupling_convention),
            cross_function: self.dimer.cross_function.unwrap_or(d.cross_function),
            trap_splitting: self.trap.splitting.unwrap_or(d.trap_splitting),
            voltage: self.trap.voltage.unwrap_or(d.voltage),
            variant: self.variant.unwrap_or(d.variant),
        };
        check_point(&point)?;

        let profile = self.numerics.profile.unwrap_or_default();
        let spectrum_points = self.spectrum.points.unwrap_or_else(|| profile.spectrum_points());
        if spectrum_points < 3 {
            return Err(CliError::validation("spectrum.points: need at least 3 points"));
        }
        let spectrum_window = match self.spectrum.window {
            Some([a, b]) if !(a.value < b.value) => {
                return Err(CliError::validation(
                    "spectrum.window: lower edge must sit below upper edge",
                ))
            }
            w => w.map(|[a, b]| [a.value, b.value]),
        };

        let sweep = match &self.sweep {
            None => None,
            Some(s) => {
                let grid = SweepGrid {
                    base: point,
                    z: expand("z", &s.z)?,
                    delta: expand("detuning", &s.detuning)?,
                    lambda: expand("reorganization", &s.reorganization)?,
                    cprime_over_z: expand("cprime_over_z", &s.cprime_over_z)?,
                    gamma_x: expand("extraction", &s.extraction)?,
                    phi1: expand("phi1", &s.phi1)?,
                    phi2: expand("phi2", &s.phi2)?,
                    theta12: expand("theta12", &s.theta12)?,
                };
                for p in grid.points() {
                    check_point(&p).map_err(|e| CliError::validation(format!("sweep: {}", e.message)))?;
                }
                Some(grid)
            }
        };

        Ok(RunConfig {
            task: self.task,
            point,
            spectrum_points,
            spectrum_window,
            profile,
            sweep,
        })
    }
}

/// Field-addressed physical checks on top of the core validation.
fn check_point(p: &DesignPoint) -> Result<(), CliError> {
    let checks: [(&str, f64, bool); 9] = [
        ("dimer.z", p.z, p.z > 0.0 && p.z <= 1.0),
        ("dimer.detuning", p.delta, p.delta >= 0.0 && p.delta < p.splitting1),
        ("dimer.cprime_over_z", p.cprime_over_z, p.cprime_over_z > 0.0),
        ("dimer.splitting1", p.splitting1, p.splitting1 > 0.0),
        ("dimer.lifetime1", p.lifetime1_ns, p.lifetime1_ns > 0.0),
        ("phonons.reorganization", p.lambda, p.lambda >= 0.0),
        ("phonons.cutoff", p.cutoff, p.cutoff > 0.0),
        ("trap.extraction", p.gamma_x, p.gamma_x >= 0.0),
        (
            "temperatures",
            p.phonon_temperature.min(p.photon_temperature).min(p.trap_temperature),
            p.phonon_temperature >= 0.0 && p.photon_temperature >= 0.0 && p.trap_temperature >= 0.0,
        ),
    ];
    for (field, value, ok) in checks {
        if !ok || !value.is_finite() {
            let hint = match field {
                "dimer.z" => " (monomer 1 carries the larger dipole, so 0 < z <= 1)",
                "dimer.detuning" => " (monomer 2 is the lower monomer: 0 <= detuning < splitting1)",
                _ => "",
            };
            return Err(CliError::validation(format!(
                "{field}: value {value} out of range{hint}"
            )));
        }
    }
    p.validate().map_err(|e| CliError::validation(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => RawConfig::from_json(&text),
        _ => RawConfig::from_toml(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_caption_defaults() {
        let c = RawConfig::from_toml("").unwrap().resolve().unwrap();
        assert_eq!(c.point, DesignPoint::default());
        assert_eq!(c.point.phonon_temperature, 300.0);
        assert_eq!(c.point.photon_temperature, 6000.0);
        assert_eq!(c.point.trap_temperature, 300.0);
        assert_eq!(c.point.cutoff, 0.3);
        assert_eq!(c.point.splitting1, 2.8);
        assert_eq!(c.point.lifetime1_ns, 5.0);
        assert!(c.sweep.is_none());
    }

    #[test]
    fn unknown_key_is_reported_with_its_location() {
        let err = RawConfig::from_toml("[dimer]\nzz = 0.5\n").unwrap_err();
        assert!(err.message.contains("zz"), "{}", err.message);
        assert!(err.message.contains("line 2"), "{}", err.message);
    }

    #[test]
    fn bare_energy_is_rejected() {
        let err = RawConfig::from_toml("[dimer]\ndetuning = 0.2\n").unwrap_err();
        assert!(err.message.contains("unit suffix"), "{}", err.message);
    }

    #[test]
    fn monomer_ordering_is_enforced() {
        let err = RawConfig::from_toml("[dimer]\nz = 1.2\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.message.starts_with("dimer.z"), "{}", err.message);
        let err = RawConfig::from_toml("[dimer]\ndetuning = \"-10 meV\"\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.message.starts_with("dimer.detuning"), "{}", err.message);
    }

    #[test]
    fn json_mirror_matches_toml() {
        let t =
            RawConfig::from_toml("[phonons]\nreorganization = \"0.1 meV\"\n[trap]\nextraction = \"1 meV\"\n").unwrap();
        let j = RawConfig::from_json(r#"{"phonons": {"reorganization": "0.1 meV"}, "trap": {"extraction": "1 meV"}}"#)
            .unwrap();
        assert_eq!(t.resolve().unwrap(), j.resolve().unwrap());
    }

    #[test]
    fn six_panel_sweep() {
        let text = r#"
[sweep]
reorganization = ["0.1 meV", "100 meV", "300 meV"]
cprime_over_z = ["100 meV", "10 meV"]
z = { from = 0.05, to = 1.0, count = 4, spacing = "log" }
detuning = { from = "0 eV", to = "2.7 eV", count = 3 }
"#;
        let c = RawConfig::from_toml(text).unwrap().resolve().unwrap();
        let grid = c.sweep.unwrap();
        assert_eq!(grid.len(), 6 * 12);
        assert!((grid.z[3] - 1.0).abs() < 1e-12);
        assert!((grid.delta[1] - 1.35).abs() < 1e-12);
    }
}
