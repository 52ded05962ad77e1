//! Task runners. Each writes its artifacts under the output directory and
//! returns the paths it wrote.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use darkstate_core::liouvillian::build_total_liouvillian;
use darkstate_core::power::{benchmark_power, benchmarked_power, run_sweep, SWEEP_CSV_HEADER};
use darkstate_core::rates::critical_ratio;
use darkstate_core::spectra::DimerSpectra;
use darkstate_core::units::inverse_temperature;
use darkstate_core::{DesignPoint, Process, RateSet, Spectrum};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, Task};
use crate::{CliError, VERSION};

/// Pass/fail line of the validation suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

pub fn run(task: Task, cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
    let mut checks = Vec::new();
    let written = match task {
        Task::Rates => rates(cfg, out)?,
        Task::Spectrum => spectrum(cfg, out)?,
        Task::Power => power(cfg, out)?,
        Task::Sweep => sweep(cfg, out)?,
        Task::Validate => {
            checks = validate(&cfg.point, cfg.profile.fraction_points())?;
            let path = out.join("validate.json");
            let all = checks.iter().all(|c| c.pass);
            write_json(&path, cfg, json!({ "all_pass": all, "checks": checks }))?;
            vec![path]
        }
    };
    Ok(Outcome { written, checks })
}

fn config_json(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn write_json(path: &Path, cfg: &RunConfig, result: serde_json::Value) -> Result<(), CliError> {
    let doc = json!({
        "darkstate_version": VERSION,
        "config": config_json(cfg),
        "result": result,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn csv_writer(path: &Path, cfg: &RunConfig) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let io = |e: std::io::Error| CliError::io(format!("cannot write {}: {e}", path.display()));
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(f, "# darkstate {VERSION}").map_err(io)?;
    writeln!(f, "# config {}", config_json(cfg)).map_err(io)?;
    Ok(csv::Writer::from_writer(f))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::io(format!("cannot write {}: {e}", path.display()))
}

fn num(x: f64) -> String {
    format!("{x:.10e}")
}

fn rates(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = &cfg.point;
    let params = p.parameters()?;
    let r = RateSet::compute(&params, p.variant)?;
    let gamma2 = params.monomer_emission_rate(1)?;
    let result = json!({
        "separation_nm": params.geometry.r12,
        "coupling_eV": params.coupling()?,
        "log10_minus_over_monomer2_emission": (r.big_gamma_minus_e / gamma2).log10(),
        "rates": r,
    });
    let path = out.join("rates.json");
    write_json(&path, cfg, result)?;
    Ok(vec![path])
}

/// Same dimer in the orientation with d̂₁ ∥ d̂₂ ⟂ r̂₁₂.
fn ideal_orientation(p: &DesignPoint) -> DesignPoint {
    let half_pi = 0.5 * std::f64::consts::PI;
    DesignPoint {
        phi1: half_pi,
        phi2: half_pi,
        theta12: 0.0,
        ..*p
    }
}

fn spectrum(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = &cfg.point;
    let s = DimerSpectra::new(&p.parameters()?, p.variant)?;
    let reference = DimerSpectra::new(&ideal_orientation(p).parameters()?, p.variant)?;
    let mut written = Vec::new();
    let mut horizon_warning = false;
    for process in [Process::Absorption, Process::Emission] {
        let m = s.model(process);
        let (lo, hi) = match cfg.spectrum_window {
            Some([lo, hi]) => (lo, hi),
            None => m.default_window(&s.rates),
        };
        for with_sideband in [true, false] {
            let spec = m.spectrum(lo, hi, cfg.spectrum_points, with_sideband)?;
            horizon_warning |= spec.horizon_warning;
            let name = match process {
                Process::Absorption => "absorption",
                Process::Emission => "emission",
            };
            let path = out.join(format!("spectrum_{name}_{}.csv", spec.variant_label()));
            write_spectrum(&path, cfg, &spec)?;
            written.push(path);
        }
    }
    // P_d needs a resolvable dark line in both spectra; an exactly dark
    // zero-phonon line (ideal homodimer at z = 1) has none.
    let points = cfg.profile.fraction_points();
    let (d, p_d_note) = match s.diagnostics(points, Some(&reference)) {
        Ok(d) => (d, None),
        Err(e) => (s.diagnostics(points, None)?, Some(e.to_string())),
    };
    let path = out.join("spectrum_summary.json");
    let result = json!({
        "diagnostics": d,
        "p_d_unavailable": p_d_note,
        "dark_frequency_eV": s.dark_frequency(),
        "cross_function_minus": s.rates.cross_minus,
        "coupling_eV": s.rates.eigen.cprime,
        "horizon_warning": horizon_warning,
    });
    write_json(&path, cfg, result)?;
    written.push(path);
    Ok(written)
}

fn write_spectrum(path: &Path, cfg: &RunConfig, s: &Spectrum) -> Result<(), CliError> {
    let mut w = csv_writer(path, cfg)?;
    let err = csv_err(path);
    w.write_record(["omega_eV", "intensity", "variant", "mu"])
        .map_err(&err)?;
    for (omega, intensity) in s.omega.iter().zip(&s.intensity) {
        w.write_record([
            num(*omega),
            num(*intensity),
            s.variant_label().into(),
            s.process.label().into(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::io(e.to_string()))
}

fn power(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let p = &cfg.point;
    let params = p.parameters()?;
    let (dimer, r) = benchmarked_power(
        &params,
        p.variant,
        p.gamma_x,
        p.trap_temperature,
        p.trap_splitting,
        p.voltage,
    )?;
    let bench = benchmark_power(&params, p.gamma_x, p.trap_temperature, p.voltage)?;
    let result = json!({
        "dimer": dimer,
        "benchmark": bench,
        "trap_splitting_eV": p.trap_splitting.value(&r),
        "gamma_minus_e_eV": r.big_gamma_minus_e,
        "gamma_plus_a_eV": r.big_gamma_plus_a,
    });
    let path = out.join("power.json");
    write_json(&path, cfg, result)?;
    Ok(vec![path])
}

fn sweep(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let grid = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::validation("sweep: task `sweep` needs a [sweep] table"))?;
    let rows = run_sweep(grid);
    let path = out.join("sweep.csv");
    let mut w = csv_writer(&path, cfg)?;
    let err = csv_err(&path);
    w.write_record(SWEEP_CSV_HEADER).map_err(&err)?;
    for row in &rows {
        w.write_record(row.csv_record()).map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::io(e.to_string()))?;
    Ok(vec![path.clone()])
}

/// Invariant suite at one design point.
pub fn validate(p: &DesignPoint, fraction_points: usize) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let params = p.parameters()?;
    let r = RateSet::compute(&params, p.variant)?;

    let defect = build_total_liouvillian(&r, p.variant).trace_defect();
    checks.push(Check {
        name: "trace",
        pass: defect < 1e-10,
        value: defect,
        tolerance: 1e-10,
        detail: "largest column-sum defect of the dimer generator".into(),
    });

    let ph = &r.phonon;
    let kms_target = (inverse_temperature(p.phonon_temperature) * r.eigen.eta).exp();
    let (kms, detail) = if ph.gamma_plus_up > 0.0 && kms_target.is_finite() {
        (
            (ph.gamma_plus_down / ph.gamma_plus_up / kms_target - 1.0).abs(),
            format!(
                "down/up {:.6e} vs exp(beta eta) {kms_target:.6e}",
                ph.gamma_plus_down / ph.gamma_plus_up
            ),
        )
    } else {
        (0.0, "no upward phonon transfer; nothing to compare".into())
    };
    checks.push(Check {
        name: "kms",
        pass: kms < 1e-3,
        value: kms,
        tolerance: 1e-3,
        detail,
    });

    let s = DimerSpectra::new(&params, p.variant)?;
    let d = s.diagnostics(fraction_points, None)?;
    let gap = (d.f_pn_a - d.f_pn_a_analytic).abs();
    checks.push(Check {
        name: "absorption_sideband_fraction",
        pass: gap < 1e-3,
        value: gap,
        tolerance: 1e-3,
        detail: format!("numeric {:.6}, analytic {:.6}", d.f_pn_a, d.f_pn_a_analytic),
    });

    // Far-detuned, weakly coupled copy: |-> should emit and absorb like monomer 2.
    let local = DesignPoint {
        delta: 0.5_f64.min(0.5 * p.splitting1),
        ..*p
    }
    .parameters()?;
    let k2 = local.kappas()[0] * local.kappas()[1];
    let local = local.with_coupling_override(Some(1e-3 / k2));
    let lr = RateSet::compute(&local, p.variant)?;
    let e = (lr.big_gamma_minus_e / local.monomer_emission_rate(1)? - 1.0).abs();
    let a = (lr.big_gamma_minus_a / local.monomer_absorption_rate(1)? - 1.0).abs();
    checks.push(Check {
        name: "localization_limit",
        pass: e.max(a) < 1e-2,
        value: e.max(a),
        tolerance: 1e-2,
        detail: format!("relative offsets emission {e:.3e}, absorption {a:.3e}"),
    });

    // Weak phonon coupling: the critical ratio of an ideal homodimer is 1.
    let weak = DesignPoint {
        lambda: 1e-5,
        z: 1.0,
        delta: 0.0,
        ..ideal_orientation(p)
    }
    .parameters()?;
    let weak = weak.clone().with_coupling_override(Some(weak.coupling()?));
    let c = critical_ratio(&weak)?;
    let dz = (c.z_c - 1.0).abs();
    let dark = c.gamma_c_minus_e / c.gamma1;
    checks.push(Check {
        name: "critical_ratio_weak_coupling",
        pass: dz < 1e-3 && dark < 1e-3,
        value: dz,
        tolerance: 1e-3,
        detail: format!("z_c {:.6}, residual |-> emission / gamma_1 {dark:.3e}", c.z_c),
    });

    Ok(checks)
}
