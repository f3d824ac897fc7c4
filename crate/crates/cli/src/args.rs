//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "coma", version, about = "Closed testing with generalized-mean local tests")]
pub struct RunConfig {
    /// Output format for reports.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    /// Valid under any dependence.
    Arbitrary,
    /// Asymptotic equicorrelated Gaussian calibration.
    Gauss,
    /// Monte Carlo table given by --table.
    Empirical,
}

impl BackendArg {
    pub fn name(self) -> &'static str {
        match self {
            BackendArg::Arbitrary => "arbitrary",
            BackendArg::Gauss => "gauss",
            BackendArg::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Type-I error of the global test against rho.
    Type1Curve,
    /// Power of the global test against rho.
    PowerCurve,
    /// Mean coma of nested sets against their size.
    ComaCurve,
    /// FDP control of gamma-selection.
    FdpExp,
    /// FWER control of the largest familywise set.
    FwerExp,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Type1Curve => "type1-curve",
            Experiment::PowerCurve => "power-curve",
            Experiment::ComaCurve => "coma-curve",
            Experiment::FdpExp => "fdp-exp",
            Experiment::FwerExp => "fwer-exp",
        }
    }
}

/// Accepts decimals as well as `inf` and `-inf`.
pub fn parse_exponent(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(r) if !r.is_nan() => Ok(r),
        _ => Err(format!("'{s}' is not a number, inf or -inf")),
    }
}

fn parse_level(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
        _ => Err(format!("'{s}' is not a level in (0, 1)")),
    }
}

/// The local test and its calibration.
#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// Exponent of the generalized mean (-1 is the harmonic mean).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_exponent)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 0.05, value_parser = parse_level)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Arbitrary)]
    pub backend: BackendArg,
    /// Calibration table for the empirical backend.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV of p-values, one per row, with an optional id column.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SetArgs {
    /// Ids separated by commas, `top-K` for the K smallest p-values, or `all`.
    #[arg(long)]
    pub set: String,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SelectMode {
    /// Largest set with familywise error control.
    #[arg(long)]
    pub fwer: bool,
    /// Largest set whose false discovery proportion is at most gamma.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Global test of all hypotheses in the input.
    Combine(DataArgs),
    /// Build a Monte Carlo calibration table (JSON).
    Calibrate {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_exponent)]
        r: f64,
        #[arg(long, default_value_t = 0.05, value_parser = parse_level)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        max_m: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = "COMA_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Closed-testing adjusted p-values, per hypothesis or for one set.
    Adjust {
        #[command(flatten)]
        data: DataArgs,
        /// Report one set instead of every hypothesis.
        #[arg(long)]
        set: Option<String>,
    },
    /// Local and closed p-values of a set and their ratio.
    Coma {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Upper bound on the number of true nulls in a set.
    Bound {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        set: SetArgs,
    },
    /// Automatic choice of a large rejection set.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        mode: SelectMode,
    },
    /// Experiments under the equicorrelated Gaussian model.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// Exponents, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_exponent, default_value = "-1")]
    pub r: Vec<f64>,
    /// Correlations, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub rho: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_level)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Arbitrary)]
    pub backend: BackendArg,
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Signal mean.
    #[arg(long, default_value_t = 2.0)]
    pub mu: f64,
    /// Signal probability (outside the queried sets for coma-curve).
    #[arg(long, default_value_t = 0.1)]
    pub pi: f64,
    /// Signal probability inside the queried sets (coma-curve).
    #[arg(long, default_value_t = 0.7)]
    pub pi_in: f64,
    /// Set sizes for coma-curve, comma separated [default: 1, 2, 5, 10, ... up to m].
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    #[arg(long, env = "COMA_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl SimulateArgs {
    pub fn set_sizes(&self) -> Vec<usize> {
        if !self.sizes.is_empty() {
            return self.sizes.clone();
        }
        let mut out: Vec<usize> = [1, 2, 5]
            .iter()
            .flat_map(|&d| (0..7).map(move |e| d * 10usize.pow(e)))
            .filter(|&k| k < self.m)
            .collect();
        out.sort_unstable();
        out.push(self.m);
        out
    }
}
