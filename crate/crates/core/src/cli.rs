//! Command-line front end: `dyadlab <experiment> [flags]`.
//!
//! Flags override the values of an optional JSON config file. Exit codes:
//! 0 on success, 1 on configuration or I/O errors, 2 when a contract check
//! failed during the run (the report is still written).

use crate::config::{Format, RunConfig};
use crate::error::{DyadError, Result};
use crate::generators::SymbolSpec;
use crate::report::ExperimentReport;
use crate::verification::experiments::{find_experiment, list_experiments};
use crate::weights::WeightSpec;
use clap::{CommandFactory, Parser};
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dyadlab", version, about = "Seeded experiments on the finite dyadic lattice")]
pub struct Cli {
    /// Experiment to run; `list` prints the registry.
    pub experiment: Option<String>,
    /// Lattice depth (1..=12).
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exponent for the L^p(w) columns.
    #[arg(long)]
    pub p: Option<f64>,
    /// Weight spec, e.g. '{"kind":"cascade","rho":0.3,"seed":7}'.
    #[arg(long)]
    pub weight: Option<String>,
    /// Symbol generator, e.g. '{"kind":"uniform"}'.
    #[arg(long)]
    pub symbols: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of the fields above; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if self.experiment.is_some() {
            cfg.experiment = self.experiment;
        }
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.weight {
            cfg.weight = serde_json::from_str::<WeightSpec>(&v).map_err(|e| DyadError::Config(format!("--weight: {e}")))?;
        }
        if let Some(v) = self.symbols {
            cfg.symbols = serde_json::from_str::<SymbolSpec>(&v).map_err(|e| DyadError::Config(format!("--symbols: {e}")))?;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        Ok(cfg)
    }
}

/// One line per registered experiment.
pub fn experiment_listing() -> String {
    list_experiments()
        .iter()
        .map(|e| format!("{:<18} {}\n", e.name, e.description))
        .collect()
}

pub struct RunOutcome {
    pub report: ExperimentReport,
    pub exit_code: i32,
}

/// Runs the configured experiment and writes its report to `cfg.out` (or
/// returns it only, when no path is set).
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let name = cfg
        .experiment
        .as_deref()
        .ok_or_else(|| DyadError::Config("no experiment given".into()))?;
    let info = find_experiment(name).ok_or_else(|| DyadError::UnknownExperiment(name.to_string()))?;
    let report = info.run(cfg)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, render(&report, cfg.format)?)?;
    }
    let exit_code = if report.contracts_hold() { EXIT_OK } else { EXIT_CONTRACT };
    Ok(RunOutcome { report, exit_code })
}

pub fn render(report: &ExperimentReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(report.to_json()? + "\n"),
        Format::Csv => report.to_csv(),
    }
}

/// Full command-line behaviour; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    if cli.experiment.as_deref() == Some("list") {
        let _ = write!(stdout, "{}", experiment_listing());
        return EXIT_OK;
    }
    let usage = || format!("{}\nexperiments:\n{}", Cli::command().render_usage(), experiment_listing());
    let cfg = match cli.into_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            if cfg.out.is_none() {
                match render(&outcome.report, cfg.format) {
                    Ok(text) => {
                        let _ = write!(stdout, "{text}");
                    }
                    Err(e) => {
                        let _ = writeln!(stderr, "error: {e}");
                        return EXIT_CONFIG;
                    }
                }
            }
            for c in outcome.report.failed_checks() {
                let kind = if c.contract { "contract violated" } else { "empirical bound exceeded" };
                let _ = writeln!(stderr, "{kind}: {} ({})", c.name, c.detail);
            }
            outcome.exit_code
        }
        Err(e @ (DyadError::UnknownExperiment(_) | DyadError::Config(_))) => {
            let _ = writeln!(stderr, "error: {e}\n{}", usage());
            EXIT_CONFIG
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}
