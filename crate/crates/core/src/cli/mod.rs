//! Batch experiment runner: `ipdyn <subcommand> --config FILE --out DIR`.
//!
//! Every subcommand writes `<subcommand>.csv` and a plain-text
//! `<subcommand>.txt` summary into the output directory and prints the
//! summary. Exit status: 0 on success, 2 on a hypothesis violation, 3 when a
//! window or budget limit is hit, 1 for anything else.

mod config;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::dynamics::{ChainFailure, DynError};
use crate::gammapoly::GammaError;
use crate::intpoly::IntPolyError;
use crate::ipsets::IpError;

pub use config::{
    parse_config, Budget, ExperimentConfig, HindmanSpec, Location, Query, SetSpec, SystemSpec, WindowSetSpec,
    WindowSpec, DEFAULT_MAX_LEN,
};
pub use run::{execute, Artifacts};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {reason}: {token:?}")]
    Parse {
        line: usize,
        token: String,
        reason: &'static str,
    },
    #[error("{at}: {reason}")]
    Validation { at: Location, reason: String },
    #[error("{at}: {source}")]
    Polynomial {
        at: Location,
        #[source]
        source: IntPolyError,
    },
    #[error("{at}: {source}")]
    Gamma {
        at: Location,
        #[source]
        source: GammaError,
    },
    #[error("missing input: {0}")]
    Missing(String),
    #[error("{path}: {reason}")]
    Input { path: String, reason: String },
    #[error("truncation {truncation}: finite sum {value} lies outside the window [-{window}, {window}]")]
    OutsideWindow { truncation: String, value: i64, window: i64 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Ip(#[from] IpError),
    #[error(transparent)]
    Pet(#[from] GammaError),
    #[error(transparent)]
    Chain(#[from] ChainFailure),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Dyn(e) | CliError::Chain(ChainFailure::Dyn(e)) => dyn_code(e),
            CliError::Chain(ChainFailure::WitnessExhausted { .. }) | CliError::OutsideWindow { .. } => 3,
            CliError::Ip(IpError::BudgetExceeded { .. } | IpError::TruncationTooLarge { .. }) => 3,
            CliError::Pet(GammaError::NonTermination { .. } | GammaError::RetriesExhausted { .. }) => 3,
            _ => 1,
        }
    }
}

fn dyn_code(e: &DynError) -> i32 {
    match e {
        DynError::HypothesisViolation(_) => 2,
        DynError::WindowTooLarge { .. } | DynError::BadWindow(_) => 3,
        _ => 1,
    }
}

#[derive(Debug, Parser)]
#[command(name = "ipdyn", version, about = "IP-set, PET and return-set experiments")]
pub struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV and summary output.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Override the window half-width W.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<i64>,
    /// Override the depth (chain length, FS depth).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Use this single generator list instead of the configured ones.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub generators: Option<Vec<i64>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the PET reduction chain on `[gamma] system`.
    PetTrace,
    /// Weights and weight vector of `[gamma] system`.
    Weights,
    /// Enumerate FS truncations and look for a witness in `[query] set`.
    Fs,
    /// Monochromatic finite sums in colorings of {1..N}.
    Hindman {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        /// Check every coloring instead of a single one.
        #[arg(long)]
        all: bool,
        /// Colors of 1, 2, …, N.
        #[arg(long, value_delimiter = ',')]
        coloring: Option<Vec<usize>>,
    },
    /// Banach density estimates and structure of `[query] set`.
    Density,
    /// N(U, V) over the window.
    ReturnSet,
    /// Polynomial return set of U, V_1..V_d along p_1..p_d.
    PolyReturn,
    /// The descending open-set chain.
    Lemma213,
    /// Polynomial return set checked against every FS truncation.
    MixingReport,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PetTrace => "pet-trace",
            Command::Weights => "weights",
            Command::Fs => "fs",
            Command::Hindman { .. } => "hindman",
            Command::Density => "density",
            Command::ReturnSet => "return-set",
            Command::PolyReturn => "poly-return",
            Command::Lemma213 => "lemma213",
            Command::MixingReport => "mixing-report",
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
