//! `cspc`: numerical experiments on structured matrices, one subcommand each.
//!
//! Each run writes a CSV or JSON data file and a `<file>.manifest.json` beside it.
//! Exit status is 0 on success, 2 for configuration errors and 3 for numerical failures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod experiments;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cspc::generators::{StructuredMatrixSpec, SymbolSpec};
use serde_json::json;

use output::{write_manifest, write_table, Format, Manifest, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<cspc::Error> for CliError {
    fn from(e: cspc::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "cspc", version, about = "Circulant decomposition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON matrix spec; each subcommand has a default.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Override the spec dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Override the spec seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Data file; defaults to `<subcommand>.<format>` in the working directory.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// `6000` or `3n`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Budget {
    Entries(usize),
    TimesN(usize),
}

impl FromStr for Budget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("budget {s:?} is neither an entry count nor a multiple like 3n");
        match s.strip_suffix('n') {
            Some(k) => k.trim().parse().map(Budget::TimesN).map_err(|_| bad()),
            None => s.trim().parse().map(Budget::Entries).map_err(|_| bad()),
        }
    }
}

impl Budget {
    fn resolve(self, n: usize) -> usize {
        match self {
            Budget::Entries(e) => e,
            Budget::TimesN(k) => k * n,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SymbolCase {
    /// (1 + θ) e^{iθ}
    Case1,
    /// θ/2π + i(θ - π)²/π² + e^{2iθ}
    Case3,
    /// Seven-diagonal band
    Banded,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Recursive,
    Transform,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 2-norm of every cycle of W A W† (default: random Toeplitz, n = 100).
    CycleNorms {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalue errors against the number of dominant cycles kept (default: symmetric Toeplitz, n = 100).
    EigErrors {
        #[command(flatten)]
        common: Common,
        /// Cycle counts; powers of two up to n by default.
        #[arg(long, value_delimiter = ',')]
        cycles: Option<Vec<usize>>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Eigenvalue errors with cycles {0, n/2} across dimensions (default: block-Toeplitz, block size 5).
    EigVsN {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "100,200,300,400,500,600,700,800,900,1000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Spectra of the circulant and direct sparsifiers at equal nonzeros (default: Toeplitz, n = 100).
    SparsifierCompare {
        #[command(flatten)]
        common: Common,
        /// Cycles kept; the direct sparsifier keeps as many entries.
        #[arg(long, default_value_t = 5)]
        cycles: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// PCG iterations for the plain, T. Chan and cycle preconditioners (default: example1, n = 2000).
    PrecondTable {
        #[command(flatten)]
        common: Common,
        /// Entry budgets, absolute or as multiples of n.
        #[arg(long, value_delimiter = ',', default_value = "1n,3n,5n,7n,9n")]
        budgets: Vec<Budget>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Defaults to 10 n.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Symbol curve, transform diagonal and eigenvalues (default: case 1, n = 200).
    SymbolCompare {
        #[command(flatten)]
        common: Common,
        /// Replace the spec symbol.
        #[arg(long, value_enum)]
        case: Option<SymbolCase>,
        /// Points on the symbol curve.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Entry magnitudes of W A W† normalized per cycle (default: example1, n = 500).
    Heatmap {
        #[command(flatten)]
        common: Common,
    },
    /// First rows of the circulant components (default: Toeplitz, n = 8).
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Method::Transform)]
        method: Method,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CycleNorms { .. } => "cycle-norms",
            Command::EigErrors { .. } => "eig-errors",
            Command::EigVsN { .. } => "eig-vs-n",
            Command::SparsifierCompare { .. } => "sparsifier-compare",
            Command::PrecondTable { .. } => "precond-table",
            Command::SymbolCompare { .. } => "symbol-compare",
            Command::Heatmap { .. } => "heatmap",
            Command::Decompose { .. } => "decompose",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::CycleNorms { common }
            | Command::EigErrors { common, .. }
            | Command::EigVsN { common, .. }
            | Command::SparsifierCompare { common, .. }
            | Command::PrecondTable { common, .. }
            | Command::SymbolCompare { common, .. }
            | Command::Heatmap { common }
            | Command::Decompose { common, .. } => common,
        }
    }

    fn default_spec(&self) -> StructuredMatrixSpec {
        match self {
            Command::CycleNorms { .. } | Command::SparsifierCompare { .. } => StructuredMatrixSpec::toeplitz(100, 0),
            Command::EigErrors { .. } => StructuredMatrixSpec::toeplitz(100, 0).with_symmetric(true),
            Command::EigVsN { .. } => StructuredMatrixSpec::block_toeplitz(100, 5, 0),
            Command::PrecondTable { .. } => StructuredMatrixSpec::example1(2000),
            Command::SymbolCompare { .. } => StructuredMatrixSpec::symbol_toeplitz(200, SymbolSpec::case1()),
            Command::Heatmap { .. } => StructuredMatrixSpec::example1(500),
            Command::Decompose { .. } => StructuredMatrixSpec::toeplitz(8, 0),
        }
    }
}

fn load_spec(cmd: &Command) -> Result<StructuredMatrixSpec, CliError> {
    let common = cmd.common();
    let mut spec = match &common.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad spec {}: {e}", path.display())))?
        }
        None => cmd.default_spec(),
    };
    if let Some(n) = common.n {
        spec.n = n;
    }
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    if let Command::SymbolCompare { case: Some(case), .. } = cmd {
        spec.symbol = Some(match case {
            SymbolCase::Case1 => SymbolSpec::case1(),
            SymbolCase::Case3 => SymbolSpec::case3(),
            SymbolCase::Banded => experiments::default_banded_symbol(),
        });
    }
    if !matches!(cmd, Command::EigVsN { .. }) {
        spec.validate()?;
    }
    Ok(spec)
}

fn configure_threads() -> Result<usize, CliError> {
    let threads = match std::env::var("CSPC_THREADS") {
        Ok(v) => {
            let t: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| CliError::Config(format!("CSPC_THREADS must be a positive integer, got {v:?}")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
            t
        }
        Err(_) => rayon::current_num_threads(),
    };
    Ok(threads)
}

fn run(cmd: &Command) -> Result<(Table, serde_json::Value, StructuredMatrixSpec), CliError> {
    let spec = load_spec(cmd)?;
    let n = spec.n;
    let (table, config) = match cmd {
        Command::CycleNorms { .. } => (experiments::cycle_norms(&spec)?, json!({})),
        Command::EigErrors { cycles, trials, .. } => {
            let cycles = cycles.clone().unwrap_or_else(|| experiments::default_cycle_sweep(n));
            let table = experiments::eig_errors(&spec, &cycles, *trials)?;
            (table, json!({ "cycles": cycles, "trials": trials }))
        }
        Command::EigVsN { sizes, trials, .. } => {
            let table = experiments::eig_vs_n(&spec, sizes, *trials)?;
            (table, json!({ "sizes": sizes, "trials": trials, "selection": "0,n/2" }))
        }
        Command::SparsifierCompare { cycles, trials, .. } => {
            let (table, circ, direct) = experiments::sparsifier_compare(&spec, *cycles, *trials)?;
            eprintln!("mean |eigenvalue|: circulant {circ:.6}, direct {direct:.6}");
            (
                table,
                json!({ "cycles": cycles, "trials": trials, "nnz": cycles * n,
                        "mean_abs_circulant": circ, "mean_abs_direct": direct }),
            )
        }
        Command::PrecondTable { budgets, tol, max_iter, .. } => {
            let resolved: Vec<usize> = budgets.iter().map(|b| b.resolve(n)).collect();
            let max_iter = max_iter.unwrap_or(10 * n);
            if !(*tol > 0.0) {
                return Err(CliError::Config(format!("--tol must be positive, got {tol}")));
            }
            let table = experiments::precond_table(&spec, &resolved, *tol, max_iter)?;
            (table, json!({ "budgets": resolved, "tol": tol, "max_iter": max_iter }))
        }
        Command::SymbolCompare { samples, .. } => {
            (experiments::symbol_compare(&spec, *samples)?, json!({ "samples": samples }))
        }
        Command::Heatmap { .. } => (experiments::heatmap(&spec)?, json!({})),
        Command::Decompose { method, .. } => {
            let recursive = matches!(method, Method::Recursive);
            let m = if recursive { "recursive" } else { "transform" };
            (experiments::decompose(&spec, recursive)?, json!({ "method": m }))
        }
    };
    Ok((table, config, spec))
}

fn execute(cmd: Command) -> Result<(), CliError> {
    let threads = configure_threads()?;
    let common = cmd.common().clone();
    let name = cmd.name();
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.{}", common.format.extension())));
    let (table, config, spec) = run(&cmd)?;
    write_table(&table, common.format, &out)?;
    let manifest = Manifest {
        tool: "cspc",
        version: cspc::VERSION,
        experiment: name,
        schema: format!("{name}/1"),
        data_file: file_name(&out),
        format: common.format,
        rows: table.rows.len(),
        seed: Some(spec.seed),
        threads,
        command: std::env::args().collect(),
        config,
        spec: Some(spec),
    };
    let path = write_manifest(&manifest, &out)?;
    eprintln!("wrote {} ({} rows) and {}", out.display(), table.rows.len(), path.display());
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cspc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
