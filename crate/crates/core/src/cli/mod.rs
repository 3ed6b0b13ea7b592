//! Command-line front end: `dist`, `check`, `extremal`, `decompose`, `sample`.
//!
//! Exit codes: 0 success, 1 failed verdict or non-extremal, 2 usage or
//! validity error, 3 truncation or positivity failure, 4 numerical failure.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::extremality::ExtremalityError;
use crate::fock::FockError;
use crate::numerics::NumericsError;
use crate::povm::{min_grid_points, PovmError};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "PHASEPURE_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "phasepure",
    version,
    about = "Phase POVMs on truncated Fock spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Outcome distribution of a state on a uniform grid.
    Dist(Options),
    /// Normalization, positivity and covariance verdicts.
    Check(Options),
    /// Extremality report with a witness when not extremal.
    Extremal(Options),
    /// Band-limited decompositions of the canonical phase POVM.
    Decompose(Options),
    /// Seeded outcome samples.
    Sample(Options),
}

#[derive(Debug, Args)]
struct Options {
    /// canonical | pegg-barnett | pm-plus | pm-minus | kernel:identity | kernel:all-ones | kernel:FILE
    #[arg(long, default_value = "canonical")]
    povm: String,
    /// Truncation dimension l (taken from the file for kernel:FILE).
    #[arg(long)]
    dim: Option<usize>,
    /// Band B (decompose only).
    #[arg(long)]
    band: Option<usize>,
    /// number:n | coherent:a+bi | phase:theta | phase-plus
    #[arg(long, default_value = "number:0")]
    state: String,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Overrides PHASEPURE_TOL and the command default.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bin the density into m equal arcs before testing.
    #[arg(long)]
    bins: Option<usize>,
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Dist,
    Check,
    Extremal,
    Decompose,
    Sample,
}

impl CommandKind {
    fn default_tol(self) -> f64 {
        match self {
            CommandKind::Extremal => crate::extremality::DEFAULT_TOL,
            _ => 1e-10,
        }
    }

    fn default_format(self) -> OutFormat {
        match self {
            CommandKind::Dist | CommandKind::Sample => OutFormat::Csv,
            _ => OutFormat::Json,
        }
    }
}

/// Fully resolved invocation, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub dim: usize,
    pub band: usize,
    pub state_spec: String,
    pub povm_spec: String,
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
    pub out_format: OutFormat,
    pub out_path: Option<String>,
    pub bins: Option<usize>,
    pub n: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Extremality(#[from] ExtremalityError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Fock(e) => fock_code(e),
            CliError::Povm(e) => povm_code(e),
            CliError::Extremality(e) => match e {
                ExtremalityError::Povm(p) => povm_code(p),
                ExtremalityError::Numerics(_) => EXIT_NUMERIC,
                _ => EXIT_USAGE,
            },
            CliError::Numerics(_) => EXIT_NUMERIC,
        }
    }
}

fn fock_code(e: &FockError) -> i32 {
    match e {
        FockError::TruncationTooSevere { .. } => EXIT_DOMAIN,
        FockError::Numerics(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn povm_code(e: &PovmError) -> i32 {
    match e {
        PovmError::NegativeDensity { .. } => EXIT_DOMAIN,
        PovmError::Numerics(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `--out` or `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli) {
        Ok((code, body, out_path)) => match emit(&body, out_path.as_deref(), stdout) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(body: &str, out: Option<&std::path::Path>, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => stdout.write_all(body.as_bytes()),
    }
}

fn execute(cli: Cli) -> Result<(i32, String, Option<PathBuf>), CliError> {
    let (kind, opts) = match cli.command {
        CommandArgs::Dist(o) => (CommandKind::Dist, o),
        CommandArgs::Check(o) => (CommandKind::Check, o),
        CommandArgs::Extremal(o) => (CommandKind::Extremal, o),
        CommandArgs::Decompose(o) => (CommandKind::Decompose, o),
        CommandArgs::Sample(o) => (CommandKind::Sample, o),
    };
    let tol = resolve_tol(kind, opts.tol, std::env::var(TOL_ENV).ok().as_deref())?;
    let povm = if kind == CommandKind::Decompose {
        None
    } else {
        Some(commands::PovmSource::resolve(&opts.povm, opts.dim)?)
    };
    let dim = match (&povm, opts.dim) {
        (Some(p), _) => p.dim(),
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Usage("--dim is required".into())),
    };
    if dim == 0 {
        return Err(CliError::Usage("--dim must be at least 1".into()));
    }
    let band = match (kind, &povm) {
        (CommandKind::Decompose, _) => opts
            .band
            .ok_or_else(|| CliError::Usage("decompose requires --band".into()))?,
        (_, Some(p)) => p.band(),
        _ => 0,
    };
    if kind != CommandKind::Decompose && opts.band.is_some_and(|b| b != band) {
        return Err(CliError::Usage(format!(
            "--band {} does not match the POVM band {band}",
            opts.band.unwrap_or(0)
        )));
    }
    let required = min_grid_points(band);
    if opts.grid < required {
        return Err(CliError::Usage(format!(
            "--grid {} is below the minimum {required} for band {band}",
            opts.grid
        )));
    }
    if opts.bins == Some(0) {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let cfg = RunConfig {
        command: kind,
        dim,
        band,
        state_spec: opts.state,
        povm_spec: opts.povm,
        grid: opts.grid,
        tol,
        seed: opts.seed,
        out_format: opts.format.unwrap_or(kind.default_format()),
        out_path: opts.out.as_ref().map(|p| p.display().to_string()),
        bins: opts.bins,
        n: opts.n,
    };
    let (code, body) = match kind {
        CommandKind::Dist => commands::dist(&cfg, povm.expect("resolved"))?,
        CommandKind::Check => commands::check(&cfg, povm.expect("resolved"))?,
        CommandKind::Extremal => commands::extremal(&cfg, povm.expect("resolved"))?,
        CommandKind::Decompose => commands::decompose(&cfg)?,
        CommandKind::Sample => commands::sample(&cfg, povm.expect("resolved"))?,
    };
    Ok((code, body, opts.out))
}

/// `--tol` beats `PHASEPURE_TOL`, which beats the command default.
pub fn resolve_tol(
    kind: CommandKind,
    flag: Option<f64>,
    env: Option<&str>,
) -> Result<f64, CliError> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{TOL_ENV}={s:?} is not a number")))?,
        (None, None) => kind.default_tol(),
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(tol)
}
