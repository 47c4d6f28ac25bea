//! `monocount`: monochromatic edge and triangle counts under random colorings.

mod commands;
mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use input::InputArgs;

#[derive(Parser, Debug)]
#[command(
    name = "monocount",
    version,
    about = "Monochromatic subgraph counts under uniformly random vertex colorings"
)]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph as an edge list
    Generate(GenerateArgs),
    /// Triangle, pyramid and 4-cycle counts with the b and s statistics
    Census(CensusArgs),
    /// Exact mean and variance of T2 and/or T3
    Moments(MomentsArgs),
    /// CLT error brackets for T3 and T2
    Bounds(BoundsArgs),
    /// Exact E Z3^4 - 3 with its configuration-class decomposition
    FourthMoment(FourthMomentArgs),
    /// Monte Carlo (or exhaustive) distribution of T2 and/or T3
    Simulate(SimulateArgs),
    /// Run the self-check suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed for gnp (same as --graph-seed)
    #[arg(long, conflicts_with = "graph_seed")]
    seed: Option<u64>,
    /// Colors for the composite family
    #[arg(long)]
    c: Option<u32>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Colors for the composite family
    #[arg(long)]
    c: Option<u32>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum StatArg {
    T2,
    T3,
    Both,
}

impl From<StatArg> for monocount_core::StatisticChoice {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::T2 => Self::T2,
            StatArg::T3 => Self::T3,
            StatArg::Both => Self::Both,
        }
    }
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    c: u32,
    #[arg(long, value_enum, default_value = "both")]
    statistic: StatArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Colors, needed for the T2 bracket
    #[arg(long)]
    c: u32,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct FourthMomentArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    c: u32,
    /// Maximum number of connected triangle sets to enumerate
    #[arg(long, default_value_t = monocount_core::fourthmoment::DEFAULT_BUDGET)]
    budget: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    c: u32,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    /// Sampling seed; required unless --exact
    #[arg(long, required_unless_present = "exact")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "both")]
    statistic: StatArg,
    /// Enumerate all colorings instead of sampling
    #[arg(long, conflicts_with_all = ["seed", "raw_out", "atom_scale"])]
    exact: bool,
    /// Cap on c^|V| for --exact
    #[arg(long, default_value_t = monocount_core::sim::DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Raw samples as little-endian u64, one per replication
    /// (T2 then T3 per replication when both are sampled)
    #[arg(long)]
    raw_out: Option<PathBuf>,
    /// Detect atoms of (T3 - E T3) / scale
    #[arg(long, requires = "atom_gap")]
    atom_scale: Option<f64>,
    /// Gap separating atoms, on the scaled axis
    #[arg(long, requires = "atom_scale")]
    atom_gap: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Also run the sampling checks
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = monocount_core::verify::DEFAULT_REPLICATIONS)]
    reps: u64,
    #[arg(long, default_value_t = monocount_core::verify::DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    /// The report was written but signals failure.
    Failed,
}

impl From<monocount_core::Error> for CliError {
    fn from(e: monocount_core::Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// The common shape of every JSON report.
#[derive(Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<input::InputInfo>,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Envelope<C, R> {
    pub fn new(
        command: &'static str,
        config: C,
        input: Option<input::InputInfo>,
        result: R,
    ) -> Self {
        Envelope {
            tool: "monocount",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            input,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes via a temporary file in the same directory, so a failed run never
/// leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write {}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}

pub fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("cannot write stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Census(a) => commands::census(a),
        Command::Moments(a) => commands::moments(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::FourthMoment(a) => commands::fourth_moment(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match &cli.command {
        Command::Generate(_) => "generate",
        Command::Census(_) => "census",
        Command::Moments(_) => "moments",
        Command::Bounds(_) => "bounds",
        Command::FourthMoment(_) => "fourth-moment",
        Command::Simulate(_) => "simulate",
        Command::Verify(_) => "verify",
    };
    let described = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => ExitCode::from(1),
        Err(CliError::Domain(msg)) => {
            eprintln!("monocount {name}: {msg}\n  arguments: {described}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("monocount {name}: {msg}\n  arguments: {described}");
            ExitCode::from(2)
        }
    }
}
