//! Command-line flags, JSON config files, and the validated run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use anharm::PivotRule;
use clap::{Parser, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Eigenvalues at one field value
    Spectrum,
    /// Lowest levels and ⟨Q⟩ over a field grid
    Scan,
    /// Eigenstates tabulated in position space
    Wavefunction,
    /// Small-field response of the ground state (c1, |Q01|, tanh fit)
    Response,
    /// Avoided crossing between two adjacent levels
    Repulsion,
    /// Spectrum and response coefficients for several basis sizes
    Converge,
}

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  configuration error (bad flags or config file)
  3  invalid model
  4  solver failure
  5  analysis failure (e.g. no avoided crossing, too few points)";

#[derive(Debug, Default, Parser)]
#[command(name = "anharm", version, about = "Spectra of polynomial oscillators in a linear field", after_help = EXIT_CODES)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// What to compute; may instead come from the config file
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Quadratic coefficient of the double well αq²/2 + βq⁴/4
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Quartic coefficient of the double well
    #[arg(long)]
    pub beta: Option<f64>,
    /// General potential Σ λ_i q^i, given as λ0,λ1,…
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub lambdas: Option<Vec<f64>>,
    /// Field strength p in −pQ
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,

    /// Basis size N [default: 50]
    #[arg(short = 'n', long = "n")]
    pub n_basis: Option<usize>,
    /// Pivot level for the basis scale: half, zero, or a level number [default: half]
    #[arg(long)]
    pub pivot: Option<String>,

    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub p_step: Option<f64>,
    #[arg(long)]
    pub q_min: Option<f64>,
    #[arg(long)]
    pub q_max: Option<f64>,
    #[arg(long)]
    pub q_points: Option<usize>,

    /// Levels to report; for `repulsion`, the lower level of the pair
    #[arg(long)]
    pub levels: Option<usize>,
    /// Upper end w of the fit window p ∈ [0, w] [default: 0.6]
    #[arg(long)]
    pub fit_window: Option<f64>,
    /// Search interval for the gap minimum [default: 0.3 1.2]
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub bracket: Option<Vec<f64>>,
    /// Half-width of the tabulated neighbourhood of p1 [default: 0.05]
    #[arg(long)]
    pub window: Option<f64>,
    /// Start of a large-field window [P, 4P] for the p^{4/3} fit (response only)
    #[arg(long)]
    pub asymptote: Option<f64>,
    /// Basis sizes for `converge` [default: 10,20,30,40]
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub n_list: Option<Vec<usize>>,

    /// Main CSV output; standard output if absent
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Full-precision key = value report
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Model-vs-data residual CSV (response only)
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    /// Worker threads for scans [env: ANHARM_THREADS]
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Config file contents. Every key is optional and has the flag's meaning.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub p: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    #[serde(alias = "n")]
    pub n_basis: Option<usize>,
    pub pivot: Option<PivotValue>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub p_step: Option<f64>,
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub q_points: Option<usize>,
    pub levels: Option<usize>,
    pub fit_window: Option<f64>,
    pub bracket: Option<[f64; 2]>,
    pub window: Option<f64>,
    pub asymptote: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub residuals: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PivotValue {
    Level(usize),
    Name(String),
}

impl FileConfig {
    pub fn from_str(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("{origin}: {e}"))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_str(&text, &path.display().to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    DoubleWell { alpha: f64, beta: f64 },
    Lambdas(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSpec,
    pub p: f64,
    pub mass: f64,
    pub hbar: f64,
    pub n_basis: usize,
    pub pivot: PivotRule,
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub q_points: usize,
    pub levels: usize,
    pub fit_window: f64,
    pub bracket: (f64, f64),
    pub window: f64,
    pub asymptote: Option<f64>,
    pub n_list: Vec<usize>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub residuals: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn parse_pivot(v: PivotValue) -> Result<PivotRule, CliError> {
    match v {
        PivotValue::Level(t) => Ok(PivotRule::Level(t)),
        PivotValue::Name(s) => match s.as_str() {
            "half" => Ok(PivotRule::Half),
            "zero" => Ok(PivotRule::Zero),
            other => other
                .parse()
                .map(PivotRule::Level)
                .map_err(|_| CliError::Config(format!("pivot: expected half, zero or a level number, got {other:?}"))),
        },
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {v}")))
    }
}

/// Merges flags over the config file (if any) and fills defaults.
pub fn parse_config(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    merge(cli, file)
}

pub fn merge(cli: Cli, file: FileConfig) -> Result<RunConfig, CliError> {
    let command = cli
        .command
        .or(file.command)
        .ok_or_else(|| CliError::Config("no command given (flag or \"command\" in config)".into()))?;

    let lambdas = cli.lambdas.or(file.lambdas);
    let alpha = cli.alpha.or(file.alpha);
    let beta = cli.beta.or(file.beta);
    let model = match (lambdas, alpha, beta) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(CliError::Config(
                "conflicting model: give either lambdas or alpha/beta, not both".into(),
            ))
        }
        (Some(l), None, None) => {
            for (i, &x) in l.iter().enumerate() {
                finite(&format!("lambdas[{i}]"), x)?;
            }
            ModelSpec::Lambdas(l)
        }
        (None, Some(a), Some(b)) => ModelSpec::DoubleWell {
            alpha: finite("alpha", a)?,
            beta: finite("beta", b)?,
        },
        (None, None, None) => return Err(CliError::Config("no model: give lambdas or alpha and beta".into())),
        (None, _, _) => return Err(CliError::Config("double well needs both alpha and beta".into())),
    };

    let pivot = match cli.pivot.map(PivotValue::Name).or(file.pivot) {
        Some(v) => parse_pivot(v)?,
        None => PivotRule::Half,
    };
    let bracket = match cli.bracket {
        Some(v) => (v[0], v[1]),
        None => file.bracket.map(|[a, b]| (a, b)).unwrap_or((0.3, 1.2)),
    };
    let levels = cli.levels.or(file.levels).unwrap_or(match command {
        Command::Repulsion => 1,
        _ => 2,
    });

    let cfg = RunConfig {
        command,
        model,
        p: finite("p", cli.p.or(file.p).unwrap_or(0.0))?,
        mass: finite("mass", cli.mass.or(file.mass).unwrap_or(1.0))?,
        hbar: finite("hbar", cli.hbar.or(file.hbar).unwrap_or(1.0))?,
        n_basis: cli.n_basis.or(file.n_basis).unwrap_or(50),
        pivot,
        p_min: finite("p_min", cli.p_min.or(file.p_min).unwrap_or(0.0))?,
        p_max: finite("p_max", cli.p_max.or(file.p_max).unwrap_or(1.0))?,
        p_step: finite("p_step", cli.p_step.or(file.p_step).unwrap_or(0.01))?,
        q_min: finite("q_min", cli.q_min.or(file.q_min).unwrap_or(-5.0))?,
        q_max: finite("q_max", cli.q_max.or(file.q_max).unwrap_or(5.0))?,
        q_points: cli.q_points.or(file.q_points).unwrap_or(1001),
        levels,
        fit_window: finite("fit_window", cli.fit_window.or(file.fit_window).unwrap_or(0.6))?,
        bracket: (finite("bracket", bracket.0)?, finite("bracket", bracket.1)?),
        window: finite("window", cli.window.or(file.window).unwrap_or(0.05))?,
        asymptote: cli.asymptote.or(file.asymptote).map(|v| finite("asymptote", v)).transpose()?,
        n_list: cli.n_list.or(file.n_list).unwrap_or_else(|| vec![10, 20, 30, 40]),
        output: cli.output.or(file.output),
        report: cli.report.or(file.report),
        residuals: cli.residuals.or(file.residuals),
        threads: cli.threads.or(file.threads),
    };
    if cfg.n_basis == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    if cfg.threads == Some(0) {
        return Err(CliError::Config("threads must be at least 1".into()));
    }
    if cfg.n_list.is_empty() {
        return Err(CliError::Config("n_list is empty".into()));
    }
    Ok(cfg)
}
