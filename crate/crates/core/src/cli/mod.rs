//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 validation or oracle convergence
//! failure, 3 tolerance failure.

pub mod commands;
pub mod figures;
pub mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_compare, cmd_figures, cmd_schedule, cmd_simulate, cmd_sweep, CompareReport,
};
pub use figures::Panel;
pub use scenario::{GridOverrides, Scenario, SweepAxis, SweepSpec};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spinwire",
    version,
    about = "Exact spin dynamics of a driven spin-orbit quantum dot"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario JSON file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Oracle grid points (power of two).
    #[arg(long = "grid-points", global = true, value_name = "N")]
    pub grid_points: Option<usize>,
    /// Oracle time step in units of T0.
    #[arg(long = "dt-over-T0", global = true, value_name = "X")]
    pub dt_over_t0: Option<f64>,
    /// Accepted for interface stability; every run is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the analytic time series of a scenario.
    Simulate,
    /// Write figure data panels (all when none are named).
    Figures {
        #[arg(value_name = "PANEL")]
        panels: Vec<String>,
    },
    /// Check the analytic solution against the grid oracle.
    Compare,
    /// Final-state observables over a parameter range.
    Sweep {
        #[arg(long, value_enum)]
        axis: Option<SweepAxis>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Print the spin-flip transit time of every driving.
    Schedule,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(Outcome::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Outcome::Failed(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_VALIDATION
        }
    }
}

enum Outcome {
    Usage(String),
    Failed(Error),
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::Failed(e)
    }
}

impl From<std::io::Error> for Outcome {
    fn from(e: std::io::Error) -> Self {
        Outcome::Failed(e.into())
    }
}

fn load(cli: &Cli) -> std::result::Result<Scenario, Outcome> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Outcome::Usage("--config PATH is required for this command".into()))?;
    Ok(Scenario::load(path)?)
}

fn out_dir(cli: &Cli, scenario: Option<&Scenario>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| scenario.and_then(|s| s.output.dir.as_ref().map(|d| s.base_dir.join(d))))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn report_paths(stdout: &mut dyn Write, paths: &[PathBuf]) -> Result<()> {
    for p in paths {
        writeln!(stdout, "wrote {}", p.display())?;
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> std::result::Result<i32, Outcome> {
    let overrides = GridOverrides {
        points: cli.grid_points,
        dt_over_t0: cli.dt_over_t0,
    };
    match &cli.command {
        Command::Simulate => {
            let s = load(cli)?;
            let paths = cmd_simulate(&s, &out_dir(cli, Some(&s)))?;
            report_paths(stdout, &paths)?;
        }
        Command::Figures { panels } => {
            let panels: Vec<Panel> = if panels.is_empty() {
                Panel::ALL.to_vec()
            } else {
                panels
                    .iter()
                    .map(|p| p.parse())
                    .collect::<Result<_>>()
                    .map_err(|e| Outcome::Usage(e.to_string()))?
            };
            let paths = cmd_figures(&panels, &out_dir(cli, None))?;
            report_paths(stdout, &paths)?;
        }
        Command::Compare => {
            let s = load(cli)?;
            let out = cli
                .out
                .clone()
                .or_else(|| s.output.dir.as_ref().map(|d| s.base_dir.join(d)));
            let report = cmd_compare(&s, overrides, out.as_deref())?;
            for line in report.lines() {
                writeln!(stdout, "{line}")?;
            }
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            writeln!(stdout, "{}: {verdict}", s.name())?;
            if !report.passed() {
                return Ok(EXIT_TOLERANCE);
            }
        }
        Command::Sweep {
            axis,
            from,
            to,
            steps,
        } => {
            let s = load(cli)?;
            let base = s.sweep;
            let pick = |flag: Option<f64>, cfg: Option<f64>, name: &str| {
                flag.or(cfg).ok_or_else(|| {
                    Outcome::Usage(format!(
                        "sweep needs --{name} or sweep.{name} in the config"
                    ))
                })
            };
            let sweep = SweepSpec {
                axis: axis.or(base.map(|b| b.axis)).ok_or_else(|| {
                    Outcome::Usage("sweep needs --axis or sweep.axis in the config".into())
                })?,
                from: pick(*from, base.map(|b| b.from), "from")?,
                to: pick(*to, base.map(|b| b.to), "to")?,
                steps: steps.or(base.map(|b| b.steps)).ok_or_else(|| {
                    Outcome::Usage("sweep needs --steps or sweep.steps in the config".into())
                })?,
            };
            let table = cmd_sweep(&s, &sweep)?;
            let path = out_dir(cli, Some(&s)).join(format!("{}_sweep.csv", s.name()));
            let path = commands::write_table(&table, path)?;
            report_paths(stdout, &[path])?;
        }
        Command::Schedule => {
            let params = match &cli.config {
                Some(path) => Scenario::load(path)?.params.resolve()?,
                None => scenario::ParamsSpec::default().resolve()?,
            };
            let table = cmd_schedule(&params)?;
            table.write(&mut *stdout)?;
            if let Some(dir) = &cli.out {
                commands::write_table(&table, dir.join("schedule.csv"))?;
            }
        }
    }
    Ok(EXIT_OK)
}
