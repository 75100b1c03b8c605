//! Command-line front end: scenario files in, CSV or JSON tables out.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration or usage error,
//! 3 numerical degeneracy.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt::Display;
use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::cavity::CavityError;
use crate::gram::GramError;
use crate::metric::MetricError;
use crate::photon_states::PhotonStateError;
use crate::single_mode::SingleModeError;
use config::{parse_config, Scenario, SourceFormat};
use output::{OutputFormat, Table};

/// Environment variable read for the thread count when `--threads` is absent.
pub const THREADS_ENV: &str = "CAVITYIO_THREADS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn config(path: impl Display, msg: impl Display) -> Self {
        CliError::Config(format!("{path}: {msg}"))
    }

    pub fn io(e: impl Display) -> Self {
        CliError::Io(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub(crate) fn at_row(self, row: usize) -> Self {
        match self {
            CliError::Numeric(m) => CliError::Numeric(format!("row {row}: {m}")),
            other => other,
        }
    }
}

impl From<PhotonStateError> for CliError {
    fn from(e: PhotonStateError) -> Self {
        use PhotonStateError as E;
        match e {
            E::GridTooShort(_)
            | E::GridNotIncreasing { .. }
            | E::LengthMismatch { .. }
            | E::InvalidWidth(_)
            | E::KernelNotSymmetric { .. }
            | E::GridTooLarge { .. }
            | E::GridMismatch => CliError::Config(e.to_string()),
            E::Cavity(c) => c.into(),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<CavityError> for CliError {
    fn from(e: CavityError) -> Self {
        match e {
            CavityError::InvalidLength(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SingleModeError> for CliError {
    fn from(e: SingleModeError) -> Self {
        match e {
            SingleModeError::PhotonState(p) => p.into(),
            SingleModeError::Cavity(c) => c.into(),
            SingleModeError::NotNormalized { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<GramError> for CliError {
    fn from(e: GramError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "cavityio", version, about = "Two-mirror cavity input-output relations and photon-counting statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (TOML, or JSON for `.json` files); `-` reads stdin
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,

    /// Output format; tables default to csv, reports to json
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Output file, or `-` for stdout
    #[arg(long, global = true, value_name = "PATH", default_value = "-")]
    pub output: String,

    /// Worker threads
    #[arg(long, global = true, env = THREADS_ENV, value_name = "N")]
    pub threads: Option<usize>,

    /// Override the frequency grid's point count
    #[arg(long, global = true, value_name = "N")]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Per-frequency B, C, M, G entries and identity residuals
    Matrices,
    /// Cartesian-product parameter sweep
    Sweep,
    /// Two-photon coincidence ratios and outcome distribution
    TwoPhoton,
    /// One-photon detection probabilities
    OnePhoton,
    /// Gram matrix of the two-photon inside kets
    Gram,
}

impl Command {
    fn default_format(self) -> OutputFormat {
        match self {
            Command::Matrices | Command::Sweep => OutputFormat::Csv,
            Command::TwoPhoton | Command::OnePhoton | Command::Gram => OutputFormat::Json,
        }
    }
}

fn read_config(path: &str, stdin: &mut dyn Read) -> Result<(String, SourceFormat), CliError> {
    let text = if path == "-" {
        let mut buf = String::new();
        stdin.read_to_string(&mut buf).map_err(|e| CliError::Config(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?
    };
    let format = SourceFormat::detect((path != "-").then_some(path), &text);
    Ok((text, format))
}

/// Loads the scenario and evaluates the command into a table.
pub fn evaluate(cli: &Cli, stdin: &mut dyn Read) -> Result<Table, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("--config is required".to_string()))?;
    let (text, format) = read_config(path, stdin)?;
    let scenario = Scenario::from_config(&parse_config(&text, format)?, cli.grid)?;
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".to_string())),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(CliError::io)?;
    pool.install(|| match cli.command {
        Command::Matrices => commands::cmd_matrices(&scenario),
        Command::Sweep => commands::cmd_sweep(&scenario),
        Command::TwoPhoton => commands::cmd_two_photon(&scenario),
        Command::OnePhoton => commands::cmd_one_photon(&scenario),
        Command::Gram => commands::cmd_gram(&scenario),
    })
}

/// Runs the command and writes its table; nothing is written on failure.
pub fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = evaluate(cli, stdin)?;
    let mut buf = Vec::new();
    table.write(cli.format.unwrap_or(cli.command.default_format()), &mut buf)?;
    if cli.output == "-" {
        stdout.write_all(&buf).and_then(|_| stdout.flush()).map_err(CliError::io)
    } else {
        std::fs::write(&cli.output, &buf).map_err(|e| CliError::Io(format!("{}: {e}", cli.output)))
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, &mut std::io::stdin().lock(), &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            let kind = match e {
                CliError::Config(_) => "config error",
                CliError::Numeric(_) => "numerical error",
                CliError::Io(_) => "i/o error",
            };
            eprintln!("cavityio: {kind}: {e}");
            e.exit_code()
        }
    }
}
