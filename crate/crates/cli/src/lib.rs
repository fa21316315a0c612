//! `tddnet` command-line front end.

pub mod analyze;
pub mod simulate;
pub mod sweep;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use tddnet_core::config::{ConfigDocument, LoadError};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "tddnet",
    version,
    about = "Packet throughput of static and dynamic TDD small-cell networks"
)]
pub struct Cli {
    /// Worker threads for replications and sweep points.
    #[arg(long, global = true, env = "TDDNET_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form throughput of a configuration.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run Monte Carlo replications of a configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the base seed of the simulation block.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep the DL/UL ratio or the SAP/UE density ratio.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Override the output path of the sweep spec.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the base seed of simulated points.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in consistency checks.
    Validate {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
        /// Corrupt a kernel to confirm the checks notice.
        #[arg(long, value_enum, hide = true)]
        mutate: Option<validate::Mutation>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0} check(s) failed")]
    Validation(usize),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Failed(_) | CliError::Validation(_) => 1,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub(crate) fn load_config(path: &Path) -> Result<ConfigDocument, CliError> {
    Ok(ConfigDocument::load(path)?)
}

/// Opens `path` for writing, or stdout when absent.
pub(crate) fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub(crate) fn write_err(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string()),
        source,
    }
}

/// Formats a number for CSV output; non-finite values become `NA`.
pub(crate) fn cell(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        "NA".to_string()
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failed(format!("cannot start worker pool: {e}")))?;
    }
    match cli.command {
        Command::Analyze { config, out } => analyze::run(&config, out.as_deref()),
        Command::Simulate { config, out, seed } => simulate::run(&config, out.as_deref(), seed),
        Command::Sweep { spec, out, seed } => sweep::run(&spec, out.as_deref(), seed),
        Command::Validate { level, mutate } => validate::run(level, mutate),
    }
}
