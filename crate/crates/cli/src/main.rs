mod commands;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lieexp_core::gf::Field;
use lieexp_core::rootsys::Family;
use lieexp_core::slcayley::DEFAULT_ORDER_CAP;
use lieexp_core::twistsys::TwistedSeries;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "lieexp", version, about = "Orbit identities, SL(n, q) Cayley graphs and their expansion")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "LIEEXP_THREADS")]
    pub threads: Option<usize>,
    /// Cap on the number of group elements any enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_CAP)]
    pub max_order: usize,
    /// Write the primary output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Coxeter-orbit identities for classical and twisted series.
    VerifyOrbits {
        /// Comma-separated series: A, B, C, D, A1odd, A1even, D1.
        #[arg(long, value_delimiter = ',', required_unless_present = "all", conflicts_with = "all")]
        series: Vec<Series>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 30)]
        max_rank: usize,
        /// Smallest rank checked (default 5 for classical, 3 for twisted).
        #[arg(long)]
        min_rank: Option<usize>,
    },
    /// Enumerate the group generated by A, B, C in SL(l+1, q).
    Slgen {
        #[arg(long)]
        l: usize,
        #[arg(long, value_parser = parse_q)]
        q: u64,
        /// Compare the BFS order with the order formula.
        #[arg(long)]
        check_order: bool,
    },
    /// Exact boundary of the test set S in the Cayley graph.
    Boundary {
        #[arg(long)]
        l: usize,
        #[arg(long, value_parser = parse_q)]
        q: u64,
        /// Fail unless the full brute-force sweep agrees.
        #[arg(long)]
        sweep_oracle: bool,
    },
    /// Second adjacency eigenvalue with the Cheeger check.
    Spectrum {
        #[arg(long)]
        l: usize,
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Mode::Dense)]
        mode: Mode,
        /// Seed for the iterative start block.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Skip the boundary computation and Cheeger comparison.
        #[arg(long)]
        no_cheeger: bool,
    },
    /// Write the Cayley graph.
    Export {
        #[arg(long)]
        l: usize,
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long, value_enum, default_value_t = ExportFormat::Edgelist)]
        format: ExportFormat,
    },
    /// Sweep boundary ratios (and small spectra) over lists of l and q.
    Report {
        #[arg(long)]
        csv: bool,
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_q)]
        q: Vec<u64>,
        /// Spectral columns are left empty above this group order.
        #[arg(long, default_value_t = 100_000)]
        spectral_max_order: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Dense,
    Iter,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Edgelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    Classical(Family),
    Twisted(TwistedSeries),
}

impl Series {
    pub const ALL: [Series; 7] = [
        Series::Classical(Family::A),
        Series::Classical(Family::B),
        Series::Classical(Family::C),
        Series::Classical(Family::D),
        Series::Twisted(TwistedSeries::A1Odd),
        Series::Twisted(TwistedSeries::D1),
        Series::Twisted(TwistedSeries::A1Even),
    ];
}

impl FromStr for Series {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Family>()
            .map(Series::Classical)
            .or_else(|_| s.parse::<TwistedSeries>().map(Series::Twisted))
            .map_err(|_| format!("unknown series {s:?} (expected A, B, C, D, A1odd, A1even or D1)"))
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::Classical(x) => x.fmt(f),
            Series::Twisted(x) => x.fmt(f),
        }
    }
}

/// Accepts `9` or `GF(3^2)`.
fn parse_q(s: &str) -> Result<u64, String> {
    let q = match s.trim().strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
        Some(inner) => {
            let (p, k) = inner.split_once('^').unwrap_or((inner, "1"));
            let p: u64 = p.parse().map_err(|e| format!("bad characteristic: {e}"))?;
            let k: u32 = k.parse().map_err(|e| format!("bad degree: {e}"))?;
            p.checked_pow(k).ok_or("field order overflows")?
        }
        None => s.trim().parse().map_err(|e| format!("bad field order {s:?}: {e}"))?,
    };
    Field::from_order(q).map_err(|e| e.to_string())?;
    Ok(q)
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

/// Primary output plus the verdict that decides between exit 0 and 1.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
    /// Set when output is partial because a cap was hit.
    pub capped: bool,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    match cli.command {
        Command::VerifyOrbits {
            series,
            all,
            max_rank,
            min_rank,
        } => {
            let series = if all { Series::ALL.to_vec() } else { series };
            commands::verify_orbits(&series, min_rank, max_rank)
        }
        Command::Slgen { l, q, check_order } => commands::slgen(c, l, q, check_order),
        Command::Boundary { l, q, sweep_oracle } => commands::boundary(c, l, q, sweep_oracle),
        Command::Spectrum {
            l,
            q,
            mode,
            seed,
            no_cheeger,
        } => commands::spectrum(c, l, q, mode, seed, !no_cheeger),
        Command::Export { l, q, format } => commands::export(c, l, q, format),
        Command::Report {
            csv,
            l,
            q,
            spectral_max_order,
        } => commands::report(c, &l, &q, csv, spectral_max_order),
    }
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    let res = match &common.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CliError::Failed(format!("writing output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if n == 0 {
            eprintln!("error: invalid configuration: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let common = cli.common.clone();
    match run(cli).and_then(|out| emit(&common, &out.text).map(|_| out)) {
        Ok(out) if out.capped => ExitCode::from(3),
        Ok(out) if out.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
