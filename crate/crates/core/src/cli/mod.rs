//! Command-line front end: argument parsing, data-file lookup, and report output.

mod commands;
pub mod formats;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::exactnum::{parse_rational, Rational};
use crate::harmonic::default_tolerance;
use crate::packing::SearchConfig;
use crate::patterns::KnapsackConfig;

pub const EXIT_PROVEN: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNPROVEN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "packbound", version, about = "Exact verification of bin packing lower bounds")]
pub struct Cli {
    /// Directory searched for data files given by name.
    #[arg(long, global = true, env = "PACKBOUND_DATA")]
    pub data_dir: Option<PathBuf>,
    /// Search nodes per feasibility check.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Feasibility checks per knapsack class.
    #[arg(long, global = true, default_value_t = 5_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub oracle_calls: u64,
    /// Width of reported intervals, as a rational or decimal ("1/10^12", "1e-12").
    #[arg(long, global = true, value_parser = parse_tolerance)]
    pub tol: Option<Rational>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Decimal places in the display-only renderings.
    #[arg(long, global = true, default_value_t = 7)]
    pub precision: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dual certificate and report the lower bound it proves.
    VerifyDual { instance: PathBuf, certificate: PathBuf },
    /// Check an offline packing scheme for every prefix of the instance.
    VerifyOpt { instance: PathBuf, scheme: PathBuf },
    /// Check a primal LP solution: constraints, tightness and pattern feasibility.
    VerifyPrimal { instance: PathBuf, primal: PathBuf },
    /// Solve the pattern LP exactly.
    SolveLp {
        instance: PathBuf,
        patterns: PathBuf,
        #[arg(long, value_enum, default_value_t = LpForm::Both)]
        form: LpForm,
    },
    /// Evaluate the parametric bounds.
    Bound(BoundArgs),
    /// Heaviest patterns for a conjectural certificate. Never reports a proof.
    Explore {
        instance: PathBuf,
        certificate: PathBuf,
        /// Conjectured heaviest patterns to compare against.
        #[arg(long)]
        patterns: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LpForm {
    Primal,
    Dual,
    Both,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(subcommand)]
    pub which: BoundKind,
}

#[derive(Debug, Subcommand)]
pub enum BoundKind {
    /// Closed-form bound for Harmonic-type algorithms in dimension d.
    Harmonic {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        d: Option<u32>,
        /// Also equalize a chain of h thresholds.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        h: Option<u64>,
        /// Dimensions 1 to 6 and the limit.
        #[arg(long)]
        table6: bool,
    },
    /// Largest inequality right-hand side for the parameters in a file.
    WorstCase { params: PathBuf },
    B1,
    B2,
    /// Equalized ratios for h = 1..h-max (numerical exploration).
    HarmonicExplore {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        d: u32,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        h_max: u64,
    },
}

fn parse_tolerance(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let r = if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m = parse_rational(m).map_err(|e| e.to_string())?;
        let e: i32 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        let p = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), e.unsigned_abs() as usize));
        if e < 0 {
            m / p
        } else {
            m * p
        }
    } else if let Some((b, e)) = t.split_once('^') {
        // "1/10^12"
        let (n, base) = b.split_once('/').ok_or_else(|| format!("bad tolerance {s:?}"))?;
        let e: usize = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        let base: num_bigint::BigInt = base.trim().parse().map_err(|_| format!("bad tolerance {s:?}"))?;
        parse_rational(n).map_err(|e| e.to_string())? / Rational::from_integer(num_traits::pow(base, e))
    } else {
        parse_rational(t).map_err(|e| e.to_string())?
    };
    if r <= Rational::from_integer(0.into()) {
        return Err("tolerance must be positive".into());
    }
    Ok(r)
}

pub(crate) struct Ctx {
    pub data_dir: PathBuf,
    pub search: SearchConfig,
    pub knapsack: KnapsackConfig,
    pub tol: Rational,
    pub precision: usize,
}

impl Ctx {
    fn from_cli(cli: &Cli) -> Self {
        let search = SearchConfig { node_budget: cli.budget, ..SearchConfig::default() };
        Ctx {
            data_dir: cli.data_dir.clone().unwrap_or_else(default_data_dir),
            search,
            knapsack: KnapsackConfig { search, max_oracle_calls: cli.oracle_calls, ..KnapsackConfig::default() },
            tol: cli.tol.clone().unwrap_or_else(default_tolerance),
            precision: cli.precision,
        }
    }

    /// `p` as given if it exists, else `p` or `p.json` under the data directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.exists() {
            return p.to_path_buf();
        }
        let under = self.data_dir.join(p);
        if under.exists() || p.extension().is_some() {
            return under;
        }
        let with_ext = under.with_extension("json");
        if with_ext.exists() {
            with_ext
        } else {
            under
        }
    }
}

pub fn default_data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// A finished command: its exit code and both renderings.
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: serde_json::Value,
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PROVEN };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let ctx = Ctx::from_cli(&cli);
    match commands::dispatch(&cli.command, &ctx) {
        Ok(o) => {
            let body = match cli.format {
                Format::Text => o.text,
                Format::Json => serde_json::to_string_pretty(&o.json).expect("report serializes") + "\n",
            };
            let _ = out.write_all(body.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
