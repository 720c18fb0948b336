//! Batch CLI over the cash-flow entropy library: analyze one economy, check
//! it for flow balance, sweep constructed economies over parameter grids,
//! or generate balanced test economies.
//!
//! Exit codes: 0 success, 1 input parse failure, 2 validation failure,
//! 3 economy not stationary, 4 generation failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cashflow_entropy::decomposition::{
    full_report, group_decomposition, DecompositionError, GroupTree, Side,
};
use cashflow_entropy::flow::FlowMatrix;
use cashflow_entropy::io::{
    load_economy, write_economy, write_report, write_sweep, EconomyFormat, IoFormatError,
};
use cashflow_entropy::steady_state::{check_stationarity, random_stationary, SteadyStateError};
use cashflow_entropy::sweep::{three_agent_sweep, two_agent_sweep, TwoAgentQuantity};

const EXIT_PARSE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NOT_STATIONARY: u8 = 3;
const EXIT_GENERATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cfe",
    version,
    about = "Entropy decomposition of inter-agent cash-flow matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze an economy file and write the full entropy report
    Analyze {
        /// Economy file (JSON or comma-separated; detected by content)
        #[arg(short, long)]
        input: PathBuf,
        /// Report destination (standard output when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Marginal the group decomposition applies to
        #[arg(long, value_enum, default_value_t = GroupSide::In)]
        group_side: GroupSide,
    },
    /// Check an economy for per-agent flow balance
    Check {
        #[arg(short, long)]
        input: PathBuf,
        /// Highest relative imbalance still considered stationary
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Sweep a two-agent economy over an (a, b) savings grid
    Sweep2 {
        /// Scalar to tabulate
        #[arg(long, value_enum, default_value_t = Quantity::H, ignore_case = true)]
        quantity: Quantity,
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        #[arg(long, default_value_t = 4.0)]
        a_max: f64,
        #[arg(long, default_value_t = 0.0)]
        b_min: f64,
        #[arg(long, default_value_t = 4.0)]
        b_max: f64,
        /// Grid points per axis
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep the three-agent economy over (a, b) at fixed k
    Sweep3 {
        /// Outflow fraction c^3_1/c^3, strictly inside (0, 1)
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0.02)]
        a_min: f64,
        #[arg(long, default_value_t = 0.98)]
        a_max: f64,
        #[arg(long, default_value_t = 0.02)]
        b_min: f64,
        #[arg(long, default_value_t = 0.98)]
        b_max: f64,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random flow-balanced economy file
    Gen {
        /// Number of agents (at least 2)
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Fraction of off-diagonal structure to drop, in [0, 1)
        #[arg(long, default_value_t = 0.0)]
        sparsity: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Quantity {
    /// Savings probability p_s
    Ps,
    /// Savings entropy H_s
    Hs,
    /// Savings-vs-transfer split entropy H_sc
    Hsc,
    /// Total cash-flow entropy H
    H,
}

impl From<Quantity> for TwoAgentQuantity {
    fn from(q: Quantity) -> Self {
        match q {
            Quantity::Ps => TwoAgentQuantity::SavingsProb,
            Quantity::Hs => TwoAgentQuantity::SavingsEntropy,
            Quantity::Hsc => TwoAgentQuantity::SplitEntropy,
            Quantity::H => TwoAgentQuantity::TotalEntropy,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum GroupSide {
    In,
    Out,
}

impl From<GroupSide> for Side {
    fn from(s: GroupSide) -> Self {
        match s {
            GroupSide::In => Side::In,
            GroupSide::Out => Side::Out,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze {
            input,
            output,
            group_side,
        } => cmd_analyze(&input, output.as_deref(), group_side.into()),
        Command::Check { input, tolerance } => cmd_check(&input, tolerance),
        Command::Sweep2 {
            quantity,
            a_min,
            a_max,
            b_min,
            b_max,
            resolution,
            output,
        } => {
            let grid = two_agent_sweep((a_min, a_max), (b_min, b_max), resolution, quantity.into())
                .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
            write_output(output.as_deref(), write_sweep(&grid).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep3 {
            k,
            a_min,
            a_max,
            b_min,
            b_max,
            resolution,
            output,
        } => {
            let grid = three_agent_sweep(k, (a_min, a_max), (b_min, b_max), resolution)
                .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
            write_output(output.as_deref(), write_sweep(&grid).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            n,
            seed,
            sparsity,
            output,
        } => cmd_gen(n, seed, sparsity, output.as_deref()),
    }
}

fn cmd_analyze(input: &Path, output: Option<&Path>, side: Side) -> Result<ExitCode, Failure> {
    let (matrix, tree) = read_economy(input)?;
    let (report, profile) = full_report(&matrix);
    let groups = match tree {
        Some(tree) => match group_decomposition(&matrix, &tree, side) {
            Ok(g) => Some(g),
            // A grouped but savings-only economy still gets its report.
            Err(DecompositionError::UndefinedMarginal) => None,
            Err(e) => return Err(Failure::new(EXIT_VALIDATION, e.to_string())),
        },
        None => None,
    };
    let bytes = write_report(&report, &profile, groups.as_ref());
    write_output(output, &bytes)?;
    eprintln!(
        "sum identity residual: {}",
        fmt_optional(report.sum_identity_residual)
    );
    eprintln!(
        "diff identity residual: {}",
        fmt_optional(report.diff_identity_residual)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(input: &Path, tolerance: f64) -> Result<ExitCode, Failure> {
    let (matrix, _) = read_economy(input)?;
    let check = check_stationarity(&matrix, tolerance)
        .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
    println!("max_relative_imbalance: {}", check.max_relative_imbalance);
    println!("fixed_point_residual: {}", check.fixed_point_residual);
    println!("is_stationary: {}", check.is_stationary);
    if check.is_stationary {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_NOT_STATIONARY))
    }
}

fn cmd_gen(n: usize, seed: u64, sparsity: f64, output: Option<&Path>) -> Result<ExitCode, Failure> {
    let matrix = random_stationary(n, seed, sparsity).map_err(|e| match e {
        SteadyStateError::UnreachableBalance { .. } => Failure::new(EXIT_GENERATION, e.to_string()),
        other => Failure::new(EXIT_VALIDATION, other.to_string()),
    })?;
    let text = write_economy(&matrix, EconomyFormat::DelimiterSeparated)
        .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
    write_output(output, text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn read_economy(path: &Path) -> Result<(FlowMatrix, Option<GroupTree>), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    let format = sniff_format(&bytes);
    load_economy(&bytes, format).map_err(|e| match e {
        IoFormatError::Parse { .. } => Failure::new(EXIT_PARSE, e.to_string()),
        other => Failure::new(EXIT_VALIDATION, other.to_string()),
    })
}

/// JSON documents start with `{`; everything else is treated as
/// delimiter-separated.
fn sniff_format(bytes: &[u8]) -> EconomyFormat {
    match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
        Some(b'{') => EconomyFormat::Structured,
        _ => EconomyFormat::DelimiterSeparated,
    }
}

fn fmt_optional(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:e}"),
        None => "undefined".into(),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, bytes).map_err(|e| {
            Failure::new(
                EXIT_VALIDATION,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::new(EXIT_VALIDATION, format!("cannot write output: {e}")))
        }
    }
}
