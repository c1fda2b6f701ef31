//! The `smlab` batch front-end: configuration, the five subcommands and
//! their table, plot-data and manifest outputs.

pub mod config;
mod decompose;
mod norms;
pub mod output;
mod report;
mod solve;
mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use output::{Manifest, Output, Status, Task};

use crate::error::{Error, Result};

/// Environment variable that overrides the configured output directory.
pub const OUT_ENV: &str = "SMLAB_OUT";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "smlab", version, about = "Dyadic decompositions, function-space norms, estimate sweeps and a Schrödinger map solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment configuration; defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (beats SMLAB_OUT and the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Dyadic piece tables and reconstruction residuals.
    Decompose,
    /// Norm breakdowns, embedding and truncation sweeps.
    Norms {
        /// Write measured constants (×2) for the sweeps to the output directory.
        #[arg(long)]
        freeze: bool,
    },
    /// Estimate sweeps judged against the regression constants.
    Verify {
        /// Write measured constants (×2) for the sweeps to the output directory.
        #[arg(long)]
        freeze: bool,
    },
    /// Picard solve with trace, energy and checkpoint output.
    Solve,
    /// Merge earlier manifests into one acceptance summary.
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Norms { .. } => "norms",
            Command::Verify { .. } => "verify",
            Command::Solve => "solve",
            Command::Report => "report",
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Parse(_) | Error::InvalidArgument(_) | Error::InvalidGrid(_))
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(m) => {
            for t in &m.tasks {
                if t.status == Status::Fail {
                    eprintln!("FAIL {}: {}", t.name, t.detail);
                }
            }
            if m.any_fail() {
                EXIT_FAIL
            } else {
                EXIT_PASS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if is_config_error(&e) {
                EXIT_CONFIG
            } else {
                EXIT_FAIL
            }
        }
    }
}

/// Load the configuration, run the command and write its manifest.
pub fn execute(cli: &Cli) -> Result<Manifest> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    match &cli.command {
        Command::Verify { .. } => {
            cfg.verify.resolved_ids()?;
        }
        Command::Report if cfg.report.inputs.is_empty() => {
            return Err(Error::Config("report.inputs is empty".into()));
        }
        _ => {}
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("smlab-out"));
    let jobs = cli.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut out = Output::create(&dir)?;
    let start = Instant::now();
    let (tasks, extra) = pool.install(|| match &cli.command {
        Command::Decompose => decompose::run(&cfg, &mut out),
        Command::Norms { freeze } => norms::run(&cfg, *freeze, &mut out),
        Command::Verify { freeze } => verify::run(&cfg, *freeze, &mut out),
        Command::Solve => solve::run(&cfg, &mut out),
        Command::Report => report::run(&cfg, &mut out),
    })?;
    let manifest = Manifest::new(cli.command.name(), &cfg, tasks, out.files().to_vec(), extra, start.elapsed().as_secs_f64());
    out.write_manifest(&manifest)?;
    Ok(manifest)
}
