//! Command-line interface. Data goes to stdout (or `--out`), diagnostics to
//! stderr. Exit codes: 0 success, 1 verification failure, 2 usage or input
//! error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permconc::bounds::{bound_curve, t1_sweep, BoundSpec, T2Variant};
use permconc::sampling::PreparedArray;
use permconc::{Array, Array2, StatKind};

use crate::error::{Result, ToolError};
use crate::formats;
use crate::grid::parse_grid;
use crate::montecarlo::estimate_tail;
use crate::verify::{self, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "permconc", version, about = "Permutation statistics: exact laws, tail estimates and concentration bounds")]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism. Results do not
    /// depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a coefficient array file.
    Gen(GenArgs),
    /// Monte Carlo tail probabilities with 99% intervals.
    Tails(TailsArgs),
    /// Evaluate a tail bound along a grid, or the large-t sweep.
    Bounds(BoundsArgs),
    /// Run exhaustive and statistical verification suites.
    Verify(VerifyArgs),
    /// Exact distribution of a statistic by full enumeration.
    Exact(ExactArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Constant,
    Uniform,
    Footrule,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stat {
    T1,
    T2,
    T3,
}

impl From<Stat> for StatKind {
    fn from(s: Stat) -> Self {
        match s {
            Stat::T1 => StatKind::T1,
            Stat::T2 => StatKind::T2,
            Stat::T3 => StatKind::T3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundStat {
    T1,
    T2,
    T3,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Variant {
    #[default]
    Nominal,
    #[value(name = "finite_n", alias = "finite-n")]
    FiniteN,
}

impl From<Variant> for T2Variant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Nominal => T2Variant::Nominal,
            Variant::FiniteN => T2Variant::FiniteN,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Side length; taken from the vectors for `product`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Fill value for `constant`.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated row factors for `product`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub cvec: Option<Vec<f64>>,
    /// Comma-separated column factors for `product`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub dvec: Option<Vec<f64>>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TailsArgs {
    #[arg(long)]
    pub array: PathBuf,
    #[arg(long, value_enum)]
    pub stat: Stat,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid `a:b:step`, inclusive of both ends when `b` is on the grid.
    #[arg(long = "t")]
    pub grid: String,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct BoundsArgs {
    #[command(subcommand)]
    pub sweep: Option<BoundsCommand>,
    #[command(flatten)]
    pub curve: CurveArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub stat: Option<BoundStat>,
    /// Required for t1 and t2.
    #[arg(long)]
    pub n: Option<usize>,
    /// The exact mean of the statistic; not used by `generic`.
    #[arg(long)]
    pub mean: Option<f64>,
    /// `B` for `generic`.
    #[arg(long)]
    pub b: Option<f64>,
    /// `C` for `generic`.
    #[arg(long = "c")]
    pub c: Option<f64>,
    #[arg(long = "t")]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub variant: Variant,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// `T1` bound at `t = n^(1+λ)` for each listed `n`.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "t1")]
    pub stat: SweepStat,
    #[arg(long)]
    pub lambda: f64,
    /// Comma-separated list of `n`.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<usize>,
    /// The mean used is `mean_scale · n^mean_power`.
    #[arg(long, default_value_t = 0.5)]
    pub mean_scale: f64,
    #[arg(long, default_value_t = 2.0)]
    pub mean_power: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepStat {
    T1,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Side length of the random arrays; ignored with `--array`.
    #[arg(long, required_unless_present = "array")]
    pub n: Option<usize>,
    /// Number of random arrays per suite.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run on this array instead of random ones.
    #[arg(long)]
    pub array: Option<PathBuf>,
    /// Break the exchange moves; the exchangeability suites must then fail.
    #[arg(long)]
    pub negative_control: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub array: PathBuf,
    #[arg(long, value_enum)]
    pub stat: Stat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `std::env::args`, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let threads = match cli.threads {
        Some(0) => return Err(ToolError::Usage("--threads must be at least 1".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ToolError::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Tails(a) => cmd_tails(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Exact(a) => cmd_exact(a),
    })
}

fn require<T>(v: Option<T>, flag: &str, context: &str) -> Result<T> {
    v.ok_or_else(|| ToolError::Usage(format!("{flag} is required {context}")))
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let array: Array = match a.kind {
        GenKind::Constant => {
            let n = require(a.n, "--n", "for constant arrays")?;
            let c = require(a.c, "--c", "for constant arrays")?;
            Array::constant(n, c, a.dims)?
        }
        GenKind::Uniform => Array::uniform(require(a.n, "--n", "for uniform arrays")?, a.seed, a.dims)?,
        GenKind::Footrule => {
            if a.dims != 2 {
                return Err(ToolError::Usage("footrule arrays are 2-D".into()));
            }
            Array2::footrule(require(a.n, "--n", "for footrule arrays")?)?.into()
        }
        GenKind::Product => {
            if a.dims != 2 {
                return Err(ToolError::Usage("product arrays are 2-D".into()));
            }
            let c = require(a.cvec, "--cvec", "for product arrays")?;
            let d = require(a.dvec, "--dvec", "for product arrays")?;
            if let Some(n) = a.n {
                if n != c.len() {
                    return Err(ToolError::Usage(format!("--n {n} does not match {} factors", c.len())));
                }
            }
            Array2::product(&c, &d)?.into()
        }
    };
    formats::write_output(a.out.as_deref(), &formats::array_to_json(&array))?;
    Ok(EXIT_OK)
}

fn cmd_tails(a: TailsArgs) -> Result<i32> {
    let array = formats::load_array(&a.array)?;
    let grid = parse_grid(&a.grid)?;
    let prepared = PreparedArray::new(array);
    let target = prepared.target(a.stat.into())?;
    let est = estimate_tail(&target, &grid, a.samples, a.seed)?;
    let text = match a.format {
        Format::Csv => formats::tails_to_csv(&est),
        Format::Json => formats::tails_to_json(&est),
    };
    formats::write_output(a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_bounds(a: BoundsArgs) -> Result<i32> {
    if let Some(BoundsCommand::Sweep(s)) = a.sweep {
        return cmd_sweep(s);
    }
    let c = a.curve;
    let stat = require(c.stat, "--stat", "for bounds")?;
    let grid = parse_grid(&require(c.grid, "--t", "for bounds")?)?;
    let mean = || require(c.mean, "--mean", "for this statistic");
    let spec = match stat {
        BoundStat::T1 => BoundSpec::T1 { n: require(c.n, "--n", "for t1")?, mean: mean()? },
        BoundStat::T2 => {
            BoundSpec::T2 { n: require(c.n, "--n", "for t2")?, mean: mean()?, variant: c.variant.into() }
        }
        BoundStat::T3 => BoundSpec::T3 { mean: mean()? },
        BoundStat::Generic => {
            BoundSpec::Generic { b: require(c.b, "--b", "for generic")?, c: require(c.c, "--c", "for generic")? }
        }
    };
    let curve = bound_curve(&spec, &grid)?;
    let text = match c.format {
        Format::Csv => formats::curve_to_csv(&curve),
        Format::Json => formats::curve_to_json(&curve),
    };
    formats::write_output(c.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_sweep(s: SweepArgs) -> Result<i32> {
    if s.n_list.is_empty() {
        return Err(ToolError::Usage("--n-list needs at least one value".into()));
    }
    let rows = s
        .n_list
        .iter()
        .map(|&n| t1_sweep(s.lambda, n, s.mean_scale, s.mean_power))
        .collect::<permconc::Result<Vec<_>>>()?;
    let text = match s.format {
        Format::Csv => formats::sweep_to_csv(&rows),
        Format::Json => formats::sweep_to_json(&rows),
    };
    formats::write_output(s.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let array = a.array.as_deref().map(formats::load_array).transpose()?;
    let cfg = VerifyConfig {
        suite: a.suite,
        n: a.n.unwrap_or(0),
        trials: a.trials,
        seed: a.seed,
        array,
        negative_control: a.negative_control,
    };
    let report = verify::run(&cfg)?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: discrepancy {} > tolerance {}", c.name, c.discrepancy, c.tolerance);
    }
    let text = serde_json::to_string_pretty(&report).expect("serializes") + "\n";
    formats::write_output(a.out.as_deref(), &text)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_exact(a: ExactArgs) -> Result<i32> {
    let array = formats::load_array(&a.array)?;
    let dist = crate::exact::exact_distribution(&array, a.stat.into())?;
    formats::write_output(a.out.as_deref(), &formats::distribution_to_json(&dist))?;
    Ok(EXIT_OK)
}
