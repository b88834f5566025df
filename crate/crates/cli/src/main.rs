//! Command-line driver for the vehicular massive MIMO aging-channel
//! simulator.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numeric or
//! runtime failures.

mod commands;
mod output;
mod schema;

use clap::{Parser, Subcommand};
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use vmimo_core::config::RunConfig;
use vmimo_core::scenarios::Scenario;
use vmimo_core::SimError;

#[derive(Parser)]
#[command(
    name = "vmimo",
    version,
    about = "Vehicular massive MIMO uplink simulator: aging channels, MR/MMSE combining, ASE block-size optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; defaults to the freeway scenario defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread count (default: all cores). Results are identical for
    /// any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Full-scale antenna configuration (M = 100).
    #[arg(long, global = true)]
    paper_fidelity: bool,

    /// Override the symbol evaluation stride.
    #[arg(long, global = true)]
    stride: Option<usize>,

    /// Resume an interrupted sweep: completed (point, C) rows are kept.
    #[arg(long, global = true)]
    resume: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate space-time correlation surfaces for six reference parameter sets
    Stcc,
    /// Per-user SE and per-cell ASE at the configured point and block size
    Se {
        /// Force the non-aging reference (ρ ≡ 1).
        #[arg(long)]
        rho_one: bool,
    },
    /// ASE-vs-C curves with C_opt over the configured (σ_T, σ_R, v) grid
    AseSweep,
    /// Fit the empirical C_opt model from one or more sweep summaries
    CoptFit {
        /// Paths to ase_sweep.json files (one per scenario × combiner).
        #[arg(long, required = true, num_args = 1..)]
        sweep: Vec<PathBuf>,
    },
    /// ΔASE of the fitted optimum against the coherence-time baseline
    DeltaAse {
        /// Path to a copt_fit.json produced by `copt-fit`.
        #[arg(long)]
        fit: PathBuf,
    },
    /// Dump the scenario geometry and one seeded drop as JSON
    LayoutDump,
}

/// CLI-level error with an exit-code category.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(m) => CliError::Config(m),
            SimError::Domain(m) => CliError::Config(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default_for(Scenario::Freeway),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(stride) = cli.stride {
        cfg.stride = stride;
    }
    if cli.paper_fidelity {
        cfg.apply_paper_fidelity();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Stcc => commands::cmd_stcc(cfg, &cli.out),
        Command::Se { rho_one } => commands::cmd_se(cfg, &cli.out, *rho_one),
        Command::AseSweep => commands::cmd_ase_sweep(cfg, &cli.out, cli.resume),
        Command::CoptFit { sweep } => commands::cmd_copt_fit(cfg, &cli.out, sweep),
        Command::DeltaAse { fit } => commands::cmd_delta_ase(cfg, &cli.out, fit),
        Command::LayoutDump => commands::cmd_layout_dump(cfg, &cli.out),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli)?;
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| dispatch(&cli, &cfg))
        }
        None => dispatch(&cli, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
