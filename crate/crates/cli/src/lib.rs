//! `triage` command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 invalid input, 3 runtime failure.

mod bench;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use bench::{peak_rss_kib, BenchReport};

/// Directory searched for assets and relative paths not found as given.
pub const ASSET_DIR_ENV: &str = "TRIAGE_ASSET_DIR";
pub const DEFAULT_NETWORK_FILE: &str = "triage_default.bnet";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Invalid(_) => 2,
            Self::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Invalid(m) | Self::Runtime(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "triage", version, about = "Bayesian-network fusion for casualty triage")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    LatestWins,
    LikelihoodProduct,
}

#[derive(Debug, Args)]
pub struct NetArg {
    /// Network file (.bnet, or .json for the JSON form). Defaults to the
    /// shipped triage network.
    pub net: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a network file and report its shape or every error found.
    Validate {
        #[command(flatten)]
        net: NetArg,
    },
    /// Print posterior marginals given an evidence file.
    Infer {
        #[command(flatten)]
        net: NetArg,
        /// JSON: {"hard": {var: state}, "virtual": {var: [likelihood...]}}
        #[arg(long)]
        evidence: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a seeded scenario through the baseline and fused arms.
    Simulate {
        scenario: PathBuf,
        /// Overrides the seed in the scenario file.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for the output artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the fusion reduction for every source and field.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Overrides the fusion cadence, seconds.
        #[arg(long)]
        cadence: Option<f64>,
        /// Overrides the golden-window length, seconds.
        #[arg(long)]
        gw: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Score an assessments file against ground truth.
    Score {
        assessments: PathBuf,
        truth: PathBuf,
        /// Second assessments file reported alongside, e.g. the raw detector.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Golden-window length, seconds.
        #[arg(long, default_value_t = triage_core::triage::DEFAULT_GOLDEN_WINDOW_S)]
        gw: f64,
        /// Judge the golden window by the first report instead of the snapshot time.
        #[arg(long)]
        first_report: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Time posterior updates and report latency percentiles and peak memory.
    Bench {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = 10_000)]
        updates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Replay newline-delimited prediction messages through the fusion engine
    /// and print assessment snapshots.
    Fuse {
        /// Message file; `-` or absent reads standard input.
        input: Option<PathBuf>,
        #[arg(long)]
        net: Option<PathBuf>,
        /// Fusion config JSON.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Resolve `p` as given, then under the asset directory.
pub fn resolve_path(p: &Path) -> PathBuf {
    if p.exists() || p.is_absolute() {
        return p.to_path_buf();
    }
    match std::env::var_os(ASSET_DIR_ENV) {
        Some(dir) if Path::new(&dir).join(p).exists() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

pub(crate) fn read(p: &Path) -> CliResult<String> {
    let p = resolve_path(p);
    std::fs::read_to_string(&p).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))
}

/// Parse argv and run. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
