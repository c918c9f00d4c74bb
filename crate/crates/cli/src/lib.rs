//! Command implementations behind the `spinorial` binary.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use spinorial::chsh::{
    maximize_chsh, CorrelationKind, Correlator, MonteCarlo, OptimizerConfig, So3Saw, Su2Cosine,
};
use spinorial::oracle::sign_model_correlation;
use spinorial::parallel::{curvature_tensor, torsion_tensor, ChartPoint};
use spinorial::sim::{
    correlation_curve, simulate_ensemble, DirectionSpec, ExperimentConfig, LambdaMode, CURVE_HEADER,
};
use spinorial::sphere::DistanceSample;
use spinorial::stats::linear_grid;
use spinorial::{fmt17, tolerances, Error};

#[derive(Debug, Parser)]
#[command(
    name = "spinorial",
    version,
    about = "Spin geometry and correlation experiments"
)]
pub struct Cli {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; CSV for tables, JSON for reports when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Overrides the seed of the command's configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    #[value(name = "su2_cosine")]
    Su2Cosine,
    #[value(name = "so3_saw")]
    So3Saw,
    #[value(name = "monte_carlo")]
    MonteCarlo,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Grid {
    #[arg(long, default_value_t = 0.0)]
    pub start: f64,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SU(2) and SO(3) distances over an angle grid (degrees, default 0..360).
    Distances(Grid),
    /// Runs an experiment described by a JSON config and writes the correlation curve.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Quadrature reference for the sign-model correlation (degrees, default 0..180).
    Oracle(Grid),
    /// Curvature and torsion of the parallelizing connection at chart points.
    TorsionCheck {
        /// JSON array of [chi, theta, phi] in degrees; a seeded random suite when omitted.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Finite-difference step in radians.
        #[arg(long, default_value_t = tolerances::FD_STEP)]
        h: f64,
    },
    /// Maximizes the CHSH string for a correlation model.
    Chsh {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Maximum number of correlator evaluations.
        #[arg(long, default_value_t = 200_000_000)]
        budget: u64,
        /// Full-sphere random restarts (analytic kinds only).
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Ensemble size for the Monte Carlo kind.
        #[arg(long, default_value_t = 1_000_000)]
        n_trials: usize,
    },
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Args(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Args(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::TooFewTrials { .. }
            | Error::StepOutOfRange { .. }
            | Error::OptimizerBudgetExceeded { .. } => CliError::Args(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Numeric(e.to_string()))
}

fn csv_table(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.into_iter().map(fmt17).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn grid(g: &Grid, default_stop: f64) -> CliResult<Vec<f64>> {
    Ok(linear_grid(
        g.start,
        g.stop.unwrap_or(default_stop),
        g.step,
    )?)
}

#[derive(Serialize)]
struct DistanceRow {
    eta: f64,
    su2: f64,
    so3: f64,
}

pub fn cmd_distances(g: &Grid, format: Format) -> CliResult<String> {
    let rows = grid(g, 360.0)?
        .into_iter()
        .map(|deg| {
            let s = DistanceSample::at(deg.to_radians())?;
            Ok(DistanceRow {
                eta: deg,
                su2: s.su2,
                so3: s.so3,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match format {
        Format::Csv => Ok(csv_table(
            "eta,su2,so3",
            rows.iter().map(|r| vec![r.eta, r.su2, r.so3]),
        )),
        Format::Json => to_json(&rows),
    }
}

pub fn cmd_simulate(config: &Path, seed: Option<u64>, format: Format) -> CliResult<String> {
    let mut cfg: ExperimentConfig = serde_json::from_str(&read(config)?)
        .map_err(|e| CliError::Args(format!("{}: {e}", config.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let trials = simulate_ensemble(&cfg)?;
    let rows = correlation_curve(&cfg, &trials)?;
    match format {
        Format::Csv => {
            let mut out = format!("{CURVE_HEADER}\n");
            for r in &rows {
                out.push_str(&r.csv());
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => to_json(&rows),
    }
}

#[derive(Serialize)]
struct OracleRow {
    theta_deg: f64,
    oracle: f64,
}

pub fn cmd_oracle(g: &Grid, format: Format) -> CliResult<String> {
    let rows = grid(g, 180.0)?
        .into_par_iter()
        .map(|deg| {
            Ok(OracleRow {
                theta_deg: deg,
                oracle: sign_model_correlation(deg.to_radians())?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match format {
        Format::Csv => Ok(csv_table(
            "theta_deg,oracle",
            rows.iter().map(|r| vec![r.theta_deg, r.oracle]),
        )),
        Format::Json => to_json(&rows),
    }
}

#[derive(Debug, Serialize)]
pub struct TorsionRecord {
    /// `[chi, theta, phi]` in degrees.
    pub point: [f64; 3],
    pub max_abs_curvature: f64,
    pub max_abs_torsion: f64,
    pub h: f64,
}

fn random_points(count: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = tolerances::CHART_COLLAR;
    let hi = std::f64::consts::PI - tolerances::CHART_COLLAR;
    (0..count)
        .map(|_| {
            let chi = rng.random_range(lo..hi);
            let theta = rng.random_range(lo..hi);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            [chi.to_degrees(), theta.to_degrees(), phi.to_degrees()]
        })
        .collect()
}

/// Returns the JSON report and a one-line summary.
pub fn cmd_torsion_check(
    points: Option<&Path>,
    count: usize,
    h: f64,
    seed: Option<u64>,
    format: Format,
) -> CliResult<(String, String)> {
    if format != Format::Json {
        return Err(CliError::Args("torsion-check writes JSON only".into()));
    }
    let pts: Vec<[f64; 3]> = match points {
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| CliError::Args(format!("{}: {e}", p.display())))?,
        None => random_points(count, seed.unwrap_or(42)),
    };
    if pts.is_empty() {
        return Err(CliError::Args("no chart points given".into()));
    }
    let records = pts
        .par_iter()
        .map(|p| {
            let x = ChartPoint::new(p[0].to_radians(), p[1].to_radians(), p[2].to_radians());
            Ok(TorsionRecord {
                point: *p,
                max_abs_curvature: curvature_tensor(&x, h)?.max_abs(),
                max_abs_torsion: torsion_tensor(&x, h)?.max_abs(),
                h,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let max_r = records
        .iter()
        .map(|r| r.max_abs_curvature)
        .fold(0.0, f64::max);
    let min_t = records
        .iter()
        .map(|r| r.max_abs_torsion)
        .fold(f64::INFINITY, f64::min);
    let max_t = records
        .iter()
        .map(|r| r.max_abs_torsion)
        .fold(0.0, f64::max);
    let summary = format!(
        "points={} max_abs_curvature={} min_max_abs_torsion={} max_abs_torsion={}",
        records.len(),
        fmt17(max_r),
        fmt17(min_t),
        fmt17(max_t)
    );
    Ok((to_json(&records)?, summary))
}

#[derive(Serialize)]
struct ChshReport {
    kind: CorrelationKind,
    max_abs_chsh: f64,
    argmax_degrees: [f64; 4],
    bound: f64,
    chsh_value: f64,
    restart_max_abs: Option<f64>,
    variance_rhs_at_argmax: f64,
    evaluations: u64,
}

pub fn cmd_chsh(
    kind: Kind,
    budget: u64,
    restarts: usize,
    n_trials: usize,
    seed: Option<u64>,
    format: Format,
) -> CliResult<String> {
    if format != Format::Json {
        return Err(CliError::Args("chsh writes JSON only".into()));
    }
    let seed = seed.unwrap_or(42);
    let mut opt = OptimizerConfig {
        seed,
        max_evals: budget,
        restarts,
        ..Default::default()
    };
    let trials;
    let mc;
    let corr: &dyn Correlator = match kind {
        Kind::Su2Cosine => &Su2Cosine,
        Kind::So3Saw => &So3Saw,
        Kind::MonteCarlo => {
            let cfg = ExperimentConfig {
                n_trials,
                seed,
                lambda_mode: LambdaMode::BalancedExact,
                alignment_mode: Default::default(),
                directions: DirectionSpec::Grid {
                    start_deg: 0.0,
                    stop_deg: 180.0,
                    step_deg: opt.grid_step_deg,
                },
            };
            trials = simulate_ensemble(&cfg)?;
            mc = MonteCarlo::new(&trials)?;
            // Grid table only: refinement and restarts would chase sampling noise.
            opt.refine_tol = None;
            opt.restarts = 0;
            &mc
        }
    };
    let r = maximize_chsh(corr, &opt)?;
    to_json(&ChshReport {
        kind: r.kind,
        max_abs_chsh: r.max_abs_chsh,
        argmax_degrees: r.argmax_degrees,
        bound: r.bound,
        chsh_value: r.chsh_value,
        restart_max_abs: r.restart_max_abs,
        variance_rhs_at_argmax: r.variance_rhs_at_argmax,
        evaluations: r.evaluations,
    })
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let table = cli.format.unwrap_or(Format::Csv);
    let report = cli.format.unwrap_or(Format::Json);
    let text = match &cli.command {
        Command::Distances(g) => cmd_distances(g, table)?,
        Command::Simulate { config } => cmd_simulate(config, cli.seed, table)?,
        Command::Oracle(g) => cmd_oracle(g, table)?,
        Command::TorsionCheck { points, count, h } => {
            let (json, summary) =
                cmd_torsion_check(points.as_deref(), *count, *h, cli.seed, report)?;
            eprintln!("{summary}");
            json
        }
        Command::Chsh {
            kind,
            budget,
            restarts,
            n_trials,
        } => cmd_chsh(*kind, *budget, *restarts, *n_trials, cli.seed, report)?,
    };
    emit(&cli.output, &text)
}

/// Runs a parsed command line; returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{}", CliError::Args("--threads must be positive".into()));
            return 1;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", CliError::Args(e.to_string()));
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
