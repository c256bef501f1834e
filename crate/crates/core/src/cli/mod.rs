//! Configuration-driven experiment runner behind the `wandering` binary.
//!
//! Every experiment records named pass/fail checks in a [`RunReport`] and
//! writes its artifacts (CSV, JSON, SVG) below the output directory. The
//! process exit status is 0 when every check passes, 1 when a check fails and
//! 2 when the configuration or the output directory is unusable.

mod config;
mod experiments;
mod export;
mod render;

pub use config::{
    BoundaryConfig, Experiment, ExperimentConfig, ModelmapConfig, RenderConfig, SilhouetteConfig,
    TrichotomyConfig,
};
pub use export::{
    export_boundary_trace, export_distance_trace, export_points, export_table, fmt_f64,
};
pub use render::{foliation_svg, leaf_radii, render_foliation};

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Parser;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub experiment: Experiment,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckResult>,
    pub metrics: BTreeMap<String, f64>,
    /// Set when `--check` stopped the run at the first failure.
    pub halted: bool,
    /// Kept out of the JSON so that reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        !self.halted && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Stops an experiment: either `--check` saw a failure or an artifact could not be written.
pub(crate) enum Stop {
    Halt,
    Fatal(CliError),
}

impl From<CliError> for Stop {
    fn from(e: CliError) -> Self {
        Stop::Fatal(e)
    }
}

pub(crate) struct Recorder {
    checks: Vec<CheckResult>,
    metrics: BTreeMap<String, f64>,
    fail_fast: bool,
}

impl Recorder {
    fn new(fail_fast: bool) -> Self {
        Self {
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            fail_fast,
        }
    }

    pub(crate) fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> Result<(), Stop> {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        if !passed && self.fail_fast {
            Err(Stop::Halt)
        } else {
            Ok(())
        }
    }

    /// Records a failed check for `Err` and hands back the value for `Ok`.
    pub(crate) fn require<T, E: std::fmt::Display>(
        &mut self,
        name: &str,
        r: Result<T, E>,
    ) -> Result<Option<T>, Stop> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) => {
                self.check(name, false, e.to_string())?;
                Ok(None)
            }
        }
    }

    pub(crate) fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }
}

pub(crate) fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Runs `experiment` (or all of them), writing artifacts below `out` and
/// `report.json` into `out` itself.
pub fn run(
    config: &ExperimentConfig,
    experiment: Experiment,
    out: &Path,
    fail_fast: bool,
) -> Result<RunReport, CliError> {
    config.validate()?;
    if let Some(declared) = config.experiment {
        if declared != experiment && experiment != Experiment::All {
            return Err(CliError::Config(format!(
                "file is for `{}` but `{}` was requested",
                declared.name(),
                experiment.name()
            )));
        }
    }
    let start = Instant::now();
    let mut rec = Recorder::new(fail_fast);
    let selected: Vec<Experiment> = if experiment == Experiment::All {
        Experiment::EACH.to_vec()
    } else {
        vec![experiment]
    };
    let mut halted = false;
    for e in selected {
        let dir = out.join(e.name());
        match experiments::run_one(e, config, &dir, &mut rec) {
            Ok(()) => {}
            Err(Stop::Halt) => {
                halted = true;
                break;
            }
            Err(Stop::Fatal(err)) => return Err(err),
        }
    }
    let report = RunReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment,
        seed: config.seed,
        config: config.clone(),
        checks: rec.checks,
        metrics: rec.metrics,
        halted,
        wall_clock: start.elapsed(),
    };
    write_json(&report, &out.join("report.json"))?;
    Ok(report)
}

#[derive(Debug, Parser)]
#[command(
    name = "wandering",
    version,
    about = "Reproducible wandering-domain experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub experiment: Experiment,
    /// TOML configuration; reference parameters are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed from the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Stop at the first failing check.
    #[arg(long, global = true)]
    pub check: bool,
}

/// Parses arguments, runs, prints one line per check and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path),
        None => Ok(ExperimentConfig::default()),
    };
    let mut config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match run(&config, cli.experiment, &cli.out, cli.check) {
        Ok(report) => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} {}", c.name, c.detail);
            }
            let failures = report.failures();
            if !failures.is_empty() {
                let list = serde_json::json!({ "failed": failures });
                eprintln!("{list}");
            }
            eprintln!(
                "{} checks, {} failed, {:.2}s",
                report.checks.len(),
                failures.len(),
                report.wall_clock.as_secs_f64()
            );
            report.exit_code()
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
