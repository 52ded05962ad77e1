use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use darkstate_cli::config::{load_config, RawConfig, Task, ToleranceProfile};
use darkstate_cli::{tasks, CliError};

/// Dimer photocell model: rates, spectra, trap power and sweeps.
#[derive(Debug, Parser)]
#[command(name = "darkstate", version)]
struct Args {
    /// TOML config (a `.json` file is read as the JSON mirror). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Task to run; overrides `task` in the config.
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `numerics.profile` in the config.
    #[arg(long, value_enum)]
    tolerance_profile: Option<ToleranceProfile>,
}

fn run(args: Args) -> Result<(), CliError> {
    let mut raw = match &args.config {
        Some(path) => load_config(path)?,
        None => RawConfig::default(),
    };
    if let Some(profile) = args.tolerance_profile {
        raw.numerics.profile = Some(profile);
    }
    if let Some(task) = args.task {
        raw.task = Some(task);
    }
    let cfg = raw.resolve()?;
    let task = cfg
        .task
        .ok_or_else(|| CliError::validation("task: give --task or set `task` in the config"))?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::validation("--threads: must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::io(e.to_string()))?;
    }

    let outcome = tasks::run(task, &cfg, &args.out)?;
    for c in &outcome.checks {
        println!(
            "{:<30} {}  {:.3e} (tolerance {:.0e})  {}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.tolerance,
            c.detail
        );
    }
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
    let failed: Vec<_> = outcome.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if !failed.is_empty() {
        return Err(CliError::numerical(format!(
            "validation checks failed: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
