use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gtcount::numeric::parse_rational;
use gtcount::{Delta, Method, Rational};

mod build;
mod runs;

#[derive(Parser)]
#[command(name = "gtcount", version, about = "Estimate the number of defectives with group tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimator against a simulated oracle and print CSV records.
    Estimate(EstimateArgs),
    /// Build a pooling design, expander graph or condenser table.
    BuildDesign(Box<BuildDesignArgs>),
    /// Build a non-adaptive ladder plan.
    BuildPlan(BuildPlanArgs),
    /// Run estimators over a parameter grid and write CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("hidden").required(true).args(["defectives", "defectives_count"])))]
pub struct EstimateArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub n: usize,
    /// Comma-separated 1-based items; an empty string means no defectives.
    #[arg(long, value_parser = parse_items)]
    pub defectives: Option<Items>,
    /// Draw this many defectives at random instead.
    #[arg(long)]
    pub defectives_count: Option<usize>,
    #[arg(long, default_value_t = 0, requires = "defectives_count")]
    pub set_seed: u64,
    /// Number of random sets to draw (with --defectives-count).
    #[arg(long, default_value_t = 1, requires = "defectives_count")]
    pub runs: usize,
    #[arg(long)]
    pub upper_d: u64,
    #[arg(long, value_parser = parse_delta)]
    pub delta: Delta,
    /// Seed for design construction.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read a GTPLAN file instead of building one.
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Exit 0 even when an estimate misses the factor.
    #[arg(long)]
    pub no_check: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DesignKindArg {
    Bernoulli,
    Expander,
    Condenser,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ValidateArg {
    Exhaustive,
    Sampled,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphArg {
    Identity,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Injective,
    Random,
    Search,
}

#[derive(Args)]
pub struct BuildDesignArgs {
    #[arg(long, value_enum)]
    pub kind: DesignKindArg,
    /// Item count (condenser default: 2^nhat).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_rational_arg)]
    pub ell: Option<Rational>,
    #[arg(long, value_parser = parse_delta)]
    pub delta: Option<Delta>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub validate: ValidateArg,
    /// Primary artifact: GTDESIGN (bernoulli), GTGRAPH (expander) or GTCOND (condenser).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the induced GTDESIGN (expander, condenser).
    #[arg(long)]
    pub design_out: Option<PathBuf>,

    /// Bernoulli: row count to start from instead of the formula value.
    #[arg(long)]
    pub t: Option<usize>,

    #[arg(long, value_enum, default_value = "random")]
    pub graph: GraphArg,
    /// Expander right side size (default 2n).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    /// Expander: expansion target size. Condenser: verdict 1 iff more than
    /// 2^k columns are fully covered. Derived from --ell and --delta when omitted.
    #[arg(long)]
    pub k: Option<u32>,
    /// Expansion factor; derived from --ell and --delta when omitted.
    #[arg(long, value_parser = parse_rational_arg)]
    pub a: Option<Rational>,

    #[arg(long, value_enum, default_value = "injective")]
    pub table: TableArg,
    #[arg(long)]
    pub nhat: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub that: u32,
    /// Defaults to nhat.
    #[arg(long)]
    pub mhat: Option<u32>,
    #[arg(long)]
    pub kprime: Option<u32>,
    #[arg(long, value_parser = parse_rational_arg, default_value = "2/3")]
    pub eps: Rational,
    /// Random tables to try with --table search.
    #[arg(long, default_value_t = 64)]
    pub tables: usize,
}

#[derive(Args)]
pub struct BuildPlanArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub upper_d: u64,
    #[arg(long, value_parser = parse_delta)]
    pub delta: Delta,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "adaptive")]
    pub method: Vec<Method>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub upper_d: Vec<u64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_delta, required = true)]
    pub delta: Vec<Delta>,
    /// Defective counts: `all` (0..=D) or a comma list of values and inclusive ranges `a..=b`.
    #[arg(long, value_parser = parse_counts, default_value = "all")]
    pub d: Counts,
    /// Random sets per grid point.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Items(pub Vec<usize>);

#[derive(Clone, Debug)]
pub enum Counts {
    All,
    List(Vec<u64>),
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: gtcount::Error| e.to_string())
}

fn parse_delta(s: &str) -> Result<Delta, String> {
    s.parse().map_err(|e: gtcount::Error| e.to_string())
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_items(s: &str) -> Result<Items, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("bad item {t:?}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Items)
}

fn parse_counts(s: &str) -> Result<Counts, String> {
    if s.trim() == "all" {
        return Ok(Counts::All);
    }
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad count {t:?}"));
        match part.split_once("..=") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(Counts::List(out))
}

/// Bad combinations of otherwise well-formed flags.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A validation that ran and failed.
#[derive(Debug)]
pub struct ValidationFailed(pub String);

impl std::fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "validation FAIL: {}", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    if err.downcast_ref::<ValidationFailed>().is_some() {
        return 4;
    }
    match err.chain().find_map(|e| e.downcast_ref::<gtcount::Error>()) {
        Some(gtcount::Error::InvalidParameter(_)) => 2,
        Some(gtcount::Error::Construction { .. } | gtcount::Error::Precondition(_) | gtcount::Error::Budget(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => runs::estimate(&a),
        Command::BuildDesign(a) => build::build_design(&a),
        Command::BuildPlan(a) => build::build_plan(&a),
        Command::Sweep(a) => runs::sweep(&a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
