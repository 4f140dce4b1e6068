//! Command-line front end. Each command is a thin adapter over the library
//! and prints a single JSON record on standard output.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 improper parameters.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::BoojumError;
use crate::estimator::{
    estimate_log_z, EstimatorConfig, ImproperPolicy, Pivot, ResolvedConfig, DEFAULT_GRID_N,
    DEFAULT_SAMPLES_P,
};
use crate::inference::{mean, moment, posterior, DirichletObservation, MomentRequest};
use crate::params::{classify, BoojumParams, PropernessVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IMPROPER: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "boojum", version, about = "Conjugate prior of the Dirichlet distribution")]
pub struct Cli {
    /// Pretty-print the output record.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify (m, r) as proper or improper.
    Check(ParamArgs),
    /// Estimate log Z(m, r).
    Logz {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
        /// Estimate even when the parameters are improper.
        #[arg(long)]
        force: bool,
    },
    /// Conjugate update of a prior with Dirichlet observations.
    Posterior {
        #[arg(long = "prior-m", allow_negative_numbers = true)]
        prior_m: f64,
        #[arg(long = "prior-r", value_parser = parse_reals, allow_hyphen_values = true)]
        prior_r: Reals,
        /// Line-delimited records `{"y": [...]}`.
        #[arg(long)]
        obs: PathBuf,
    },
    /// Estimate the mean vector.
    Mean {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
    },
    /// Estimate a moment of total order at most 2.
    Moment {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
        /// Comma-separated multi-index, one entry per coordinate.
        #[arg(long, value_parser = parse_orders)]
        order: Orders,
    },
    /// Scan the properness region over a K = 2 rate grid and write CSV.
    Region {
        #[arg(long = "m", allow_negative_numbers = true)]
        m: f64,
        /// `lo,hi` range of r1.
        #[arg(long, value_parser = parse_range)]
        r1: (f64, f64),
        /// `lo,hi` range of r2.
        #[arg(long, value_parser = parse_range)]
        r2: (f64, f64),
        /// Grid points per axis (>= 2).
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

pub type Reals = Vec<f64>;
pub type Orders = Vec<u32>;

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Shape m.
    #[arg(short = 'm', allow_negative_numbers = true)]
    pub m: f64,
    /// Rate vector, comma-separated.
    #[arg(short = 'r', value_parser = parse_reals, allow_hyphen_values = true)]
    pub r: Reals,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// Lattice resolution N.
    #[arg(long = "grid-n", default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Number of Gamma samples P.
    #[arg(long, default_value_t = DEFAULT_SAMPLES_P)]
    pub samples: usize,
    /// Pivot rate, or `auto` for half the smallest rate.
    #[arg(long, default_value = "auto", value_parser = parse_pivot)]
    pub rho: Pivot,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (does not change results).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl EstimatorArgs {
    fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            grid_n: self.grid_n,
            samples_p: self.samples,
            rho: self.rho,
            seed: self.seed,
        }
    }
}

fn parse_reals(s: &str) -> Result<Reals, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let v: f64 = part.parse().map_err(|_| format!("'{part}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{part}' is not finite"))
            }
        })
        .collect()
}

fn parse_orders(s: &str) -> Result<Orders, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse().map_err(|_| format!("'{part}' is not a nonnegative integer"))
        })
        .collect()
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    match parse_reals(s)?[..] {
        [lo, hi] if lo < hi => Ok((lo, hi)),
        [_, _] => Err("range needs lo < hi".into()),
        _ => Err("range must be 'lo,hi'".into()),
    }
}

fn parse_pivot(s: &str) -> Result<Pivot, String> {
    if s == "auto" {
        return Ok(Pivot::Auto);
    }
    let rho: f64 = s.parse().map_err(|_| format!("'{s}' is neither 'auto' nor a number"))?;
    if rho.is_finite() && rho > 0.0 {
        Ok(Pivot::Fixed(rho))
    } else {
        Err("rho must be positive".into())
    }
}

/// A failed command: exit code plus message for standard error.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<BoojumError> for CliError {
    fn from(err: BoojumError) -> Self {
        let code = match err {
            BoojumError::Improper { .. } => EXIT_IMPROPER,
            _ => EXIT_USAGE,
        };
        Self { code, message: err.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        Self::usage(err.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct PosteriorRecord {
    #[serde(flatten)]
    pub params: BoojumParams,
    #[serde(flatten)]
    pub verdict: PropernessVerdict,
}

#[derive(Debug, Serialize)]
pub struct MeanRecord {
    pub mean: Vec<f64>,
    pub config: ResolvedConfig,
}

#[derive(Debug, Serialize)]
pub struct MomentRecord {
    pub order: Vec<u32>,
    pub moment: f64,
    pub config: ResolvedConfig,
}

#[derive(Debug, Serialize)]
pub struct RegionRecord {
    pub out: String,
    pub rows: usize,
    pub proper_rows: usize,
}

#[derive(Deserialize)]
struct ObservationLine {
    y: Vec<f64>,
}

/// One row of a properness scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRow {
    pub r1: f64,
    pub r2: f64,
    pub proper: bool,
    pub t_value: Option<f64>,
}

fn params(m: f64, r: Reals) -> Result<BoojumParams, CliError> {
    Ok(BoojumParams::new(m, r)?)
}

fn resolved(config: &EstimatorConfig, params: &BoojumParams) -> Result<ResolvedConfig, CliError> {
    Ok(ResolvedConfig {
        grid_n: config.grid_n,
        samples_p: config.samples_p,
        rho: config.rho.resolve(params)?,
        seed: config.seed,
    })
}

/// Reads `{"y": [...]}` records, one per non-blank line.
pub fn read_observations(path: &Path) -> Result<Vec<DirichletObservation>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ObservationLine = serde_json::from_str(&line)
            .map_err(|e| CliError::usage(format!("line {lineno}: {e}")))?;
        let obs = DirichletObservation::new(record.y).map_err(|e| match e {
            BoojumError::ZeroComponent { .. } => {
                CliError::usage(format!("zero component at line {lineno}"))
            }
            other => CliError::usage(format!("line {lineno}: {other}")),
        })?;
        out.push(obs);
    }
    Ok(out)
}

/// Evenly spaced grid including both ends.
fn axis(lo: f64, hi: f64, steps: usize) -> impl Iterator<Item = f64> {
    (0..steps).map(move |i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
}

/// Properness over a `steps × steps` grid of `(r1, r2)`, `r1` outermost.
pub fn region_scan(
    m: f64,
    r1: (f64, f64),
    r2: (f64, f64),
    steps: usize,
) -> Result<Vec<RegionRow>, CliError> {
    if steps < 2 {
        return Err(CliError::usage("--steps must be >= 2"));
    }
    let mut rows = Vec::with_capacity(steps * steps);
    for a in axis(r1.0, r1.1, steps) {
        for b in axis(r2.0, r2.1, steps) {
            let verdict = classify(&BoojumParams::new(m, vec![a, b])?);
            rows.push(RegionRow { r1: a, r2: b, proper: verdict.proper, t_value: verdict.t_value });
        }
    }
    Ok(rows)
}

pub fn write_region_csv(rows: &[RegionRow], out: &mut impl Write) -> io::Result<()> {
    out.write_all(b"r1,r2,proper,t_value\n")?;
    for row in rows {
        let t = row.t_value.map(|t| t.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", row.r1, row.r2, u8::from(row.proper), t)?;
    }
    Ok(())
}

fn emit(out: &mut impl Write, value: &impl Serialize, pretty: bool) -> Result<(), CliError> {
    let text = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) }
        .map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs a parsed command. Returns the exit code for success paths (`check`
/// reports improper parameters with code 2 after printing its record).
pub fn execute(cli: Cli, out: &mut impl Write) -> Result<i32, CliError> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Check(args) => {
            let verdict = classify(&params(args.m, args.r)?);
            emit(out, &verdict, pretty)?;
            Ok(if verdict.proper { EXIT_OK } else { EXIT_IMPROPER })
        }
        Command::Logz { params: p, estimator, force } => {
            let params = params(p.m, p.r)?;
            let policy = if force { ImproperPolicy::Allow } else { ImproperPolicy::Reject };
            let config = estimator.config();
            let est = with_threads(estimator.threads, || estimate_log_z(&params, &config, policy))??;
            emit(out, &est, pretty)?;
            Ok(EXIT_OK)
        }
        Command::Posterior { prior_m, prior_r, obs } => {
            let prior = params(prior_m, prior_r)?;
            let observations = read_observations(&obs)?;
            let post = posterior(&prior, &observations)?;
            let verdict = classify(&post);
            emit(out, &PosteriorRecord { params: post, verdict }, pretty)?;
            Ok(EXIT_OK)
        }
        Command::Mean { params: p, estimator } => {
            let params = params(p.m, p.r)?;
            let config = estimator.config();
            let values = with_threads(estimator.threads, || mean(&params, &config))??;
            emit(out, &MeanRecord { mean: values, config: resolved(&config, &params)? }, pretty)?;
            Ok(EXIT_OK)
        }
        Command::Moment { params: p, estimator, order } => {
            let params = params(p.m, p.r)?;
            let config = estimator.config();
            let req = MomentRequest::new(order.clone())?;
            let value = with_threads(estimator.threads, || moment(&params, &req, &config))??;
            emit(
                out,
                &MomentRecord { order, moment: value, config: resolved(&config, &params)? },
                pretty,
            )?;
            Ok(EXIT_OK)
        }
        Command::Region { m, r1, r2, steps, out: path } => {
            let rows = region_scan(m, r1, r2, steps)?;
            let file = File::create(&path)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
            let mut writer = BufWriter::new(file);
            write_region_csv(&rows, &mut writer)?;
            writer.flush()?;
            let record = RegionRecord {
                out: path.display().to_string(),
                rows: rows.len(),
                proper_rows: rows.iter().filter(|r| r.proper).count(),
            };
            emit(out, &record, pretty)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the record to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
