//! Command-line driver for `pairci-core`: configuration from flags and
//! `key = value` files, single solves, g-sweeps, crossover search, density
//! and orbital export, and oracle runs. Output is CSV or JSON.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{RunConfig, Settings};
pub use error::{CliError, Result};
pub use output::{Cell, Output, Table};

#[derive(Debug, Parser)]
#[command(name = "pairci", version, about = "Two bosons with contact interaction in a polynomial trap")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest states: energies, residuals, occupancies
    Solve(Flags),
    /// Ground-state energies and occupancies over a range of g
    Sweep(Flags),
    /// Bisect for the g where λ0 − λ1 drops to the threshold
    Crossover(Flags),
    /// One-body and pair densities of the ground state
    Density(Flags),
    /// Natural orbitals of the ground state sampled on a grid
    Orbitals(Flags),
    /// Brute-force grid references (tg, exact-harmonic, grid2d, grid1d)
    Oracle(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Sweep(_) => "sweep",
            Command::Crossover(_) => "crossover",
            Command::Density(_) => "density",
            Command::Orbitals(_) => "orbitals",
            Command::Oracle(_) => "oracle",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Solve(f)
            | Command::Sweep(f)
            | Command::Crossover(f)
            | Command::Density(f)
            | Command::Orbitals(f)
            | Command::Oracle(f) => f,
        }
    }
}

/// Every flag mirrors a config-file key; a flag overrides the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// key = value file read before the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// harmonic, double_well, triple_well or custom
    #[arg(long)]
    pub potential: Option<String>,
    /// Shape parameter of the double and triple wells
    #[arg(long)]
    pub a: Option<String>,
    /// Comma-separated c0,c1,… of a custom polynomial
    #[arg(long, allow_hyphen_values = true)]
    pub coefficients: Option<String>,
    /// Interaction strength
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Lower end of a sweep range or crossover bracket
    #[arg(long, allow_hyphen_values = true)]
    pub g_min: Option<String>,
    /// Upper end of a sweep range or crossover bracket
    #[arg(long, allow_hyphen_values = true)]
    pub g_max: Option<String>,
    /// Number of sweep points
    #[arg(long)]
    pub points: Option<String>,
    /// lin or log
    #[arg(long)]
    pub spacing: Option<String>,
    /// Explicit comma-separated sweep values (overrides the range)
    #[arg(long, allow_hyphen_values = true)]
    pub g_values: Option<String>,
    /// Basis cutoff (number of oscillator functions)
    #[arg(long = "K", alias = "k")]
    pub cutoff: Option<String>,
    /// Number of states to keep
    #[arg(long)]
    pub n_states: Option<String>,
    /// auto, or a fixed basis frequency
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub omega_lo: Option<String>,
    #[arg(long)]
    pub omega_hi: Option<String>,
    #[arg(long)]
    pub omega_rel_tol: Option<String>,
    /// Half-width L of the grid [−L, L]
    #[arg(long)]
    pub grid_half_width: Option<String>,
    /// Number of grid points (odd)
    #[arg(long)]
    pub grid_points: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Directory for output files; stdout when absent
    #[arg(long)]
    pub out: Option<String>,
    /// Worker threads for sweeps
    #[arg(long)]
    pub workers: Option<String>,
    /// Crossover threshold on λ0 − λ1
    #[arg(long)]
    pub threshold: Option<String>,
    /// Relative bracket width at which bisection stops
    #[arg(long)]
    pub rel_tol: Option<String>,
    /// Number of orbitals or occupancies to print
    #[arg(long)]
    pub count: Option<String>,
    /// Oracle type
    #[arg(long = "type")]
    pub oracle: Option<String>,
}

impl Flags {
    fn settings(&self) -> Result<Settings> {
        let mut s = Settings::new();
        let pairs = [
            ("potential", &self.potential),
            ("a", &self.a),
            ("coefficients", &self.coefficients),
            ("g", &self.g),
            ("g_min", &self.g_min),
            ("g_max", &self.g_max),
            ("points", &self.points),
            ("spacing", &self.spacing),
            ("g_values", &self.g_values),
            ("K", &self.cutoff),
            ("n_states", &self.n_states),
            ("omega", &self.omega),
            ("omega_lo", &self.omega_lo),
            ("omega_hi", &self.omega_hi),
            ("omega_rel_tol", &self.omega_rel_tol),
            ("grid_half_width", &self.grid_half_width),
            ("grid_points", &self.grid_points),
            ("format", &self.format),
            ("out", &self.out),
            ("workers", &self.workers),
            ("threshold", &self.threshold),
            ("rel_tol", &self.rel_tol),
            ("count", &self.count),
            ("type", &self.oracle),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                s.set(k, v)?;
            }
        }
        Ok(s)
    }

    /// Config file first, then flags on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::new(),
        };
        s.overlay(&self.settings()?);
        RunConfig::from_settings(&s)
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Output> {
    match command {
        Command::Solve(_) => commands::run_solve(cfg),
        Command::Sweep(_) => commands::run_sweep(cfg),
        Command::Crossover(_) => commands::run_crossover(cfg),
        Command::Density(_) => commands::run_density(cfg),
        Command::Orbitals(_) => commands::run_orbitals(cfg),
        Command::Oracle(_) => commands::run_oracle(cfg),
    }
}

/// Parse, run and write. Returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "pairci {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn run(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = command.flags().resolve()?;
    let out = execute(command, &cfg)?;
    for w in &out.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    match &cfg.out {
        Some(dir) => {
            out.write_dir(dir, cfg.format)?;
        }
        None => stdout.write_all(&out.render(cfg.format)?)?,
    }
    Ok(())
}
