use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parking_core::sweep::{Axis, SweepParam};
use parking_core::{CurveMode, GameConfig, Metric};
use serde::Deserialize;

/// Gap allowed between `gamma` and `beta + delta` when all three are given.
const PRICING_CONSISTENCY: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "parking",
    version,
    about = "Equilibria, social cost and Price of Anarchy of the parking spot selection game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a single game: equilibria, PoA, pricing thresholds.
    Solve(SolveArgs),
    /// Social cost against sigma (pure) or p (mixed).
    Curve(CurveArgs),
    /// Metrics over a one- or two-dimensional parameter grid.
    Sweep(SweepArgs),
    /// Equilibrium competition probability against population size.
    EquilibriumCurve(EquilibriumCurveArgs),
    /// Check the closed forms against brute force over a grid of small games.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pure,
    Mixed,
}

impl From<Mode> for CurveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Pure => CurveMode::Pure,
            Mode::Mixed => CurveMode::Mixed,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Number of drivers N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of public spots R.
    #[arg(long)]
    pub r: Option<usize>,
    /// Cost of a public spot.
    #[arg(long = "c-pub")]
    pub c_pub: Option<f64>,
    /// Private lot price as a multiple of the public price.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Cost multiple paid by a driver who competes and loses.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// gamma - beta; gamma is derived when only beta and delta are given.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Probability that a driver is looking for parking.
    #[arg(long = "p-act")]
    pub p_act: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo samples (solve only).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with default values for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=2))]
    pub figure: Option<u8>,
    #[arg(long, value_enum, default_value = "pure")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Use the beta x delta PoA grid (overridden by explicit --axis/--metrics).
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=3))]
    pub figure: Option<u8>,
    /// `name=start:stop:step`, at most twice; the first axis varies slowest.
    #[arg(long = "axis", value_parser = parse_axis)]
    pub axes: Vec<Axis>,
    /// Comma-separated metric names.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<Metric>,
    /// Baseline competition probability for social_cost_mixed.
    #[arg(long)]
    pub p: Option<f64>,
    /// Baseline competitor count for social_cost_pure and potential.
    #[arg(long)]
    pub sigma: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EquilibriumCurveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = clap::value_parser!(u8).range(4..=4))]
    pub figure: Option<u8>,
    /// Population grid `start:stop:step`.
    #[arg(long = "n-range", value_parser = parse_n_range, default_value = "10:1000:10")]
    pub n_range: Axis,
    /// Comma-separated activity probabilities (default 0.5,0.7,1, or --p-act).
    #[arg(long = "p-acts", value_delimiter = ',')]
    pub p_acts: Vec<f64>,
    /// `beta:gamma` pricing pair, repeatable (default: --beta/--gamma).
    #[arg(long = "pricing", value_parser = parse_pricing)]
    pub pricing: Vec<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "n-min", default_value_t = 2)]
    pub n_min: usize,
    #[arg(long = "n-max", default_value_t = parking_core::oracle::BRUTE_FORCE_CAP)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub deltas: Vec<f64>,
    /// Shift the threshold used by the closed form (negative control).
    #[arg(long = "corrupt-sigma0", hide = true, default_value_t = 0.0)]
    pub corrupt_sigma0: f64,
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(a)?, num(b)?, num(c)?))
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let (name, range) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=start:stop:step, got `{s}`"))?;
    let param: SweepParam = name.trim().parse().map_err(|e| format!("{e}"))?;
    let (start, stop, step) = parse_range(range)?;
    Axis::new(param, start, stop, step).map_err(|e| e.to_string())
}

fn parse_n_range(s: &str) -> Result<Axis, String> {
    let (start, stop, step) = parse_range(s)?;
    Axis::new(SweepParam::NDrivers, start, stop, step).map_err(|e| e.to_string())
}

fn parse_pricing(s: &str) -> Result<(f64, f64), String> {
    let (b, g) = s
        .split_once(':')
        .ok_or_else(|| format!("expected beta:gamma, got `{s}`"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(b)?, num(g)?))
}

/// Contents of a `--config` file. Keys are the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    r: Option<usize>,
    c_pub: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    p_act: Option<f64>,
    seed: Option<u64>,
    samples: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Flag values after merging in the config file. Flags win.
#[derive(Debug, Clone, Default)]
pub struct Resolved {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub c_pub: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub p_act: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        Ok(Resolved {
            n: self.n.or(file.n),
            r: self.r.or(file.r),
            c_pub: self.c_pub.or(file.c_pub),
            beta: self.beta.or(file.beta),
            gamma: self.gamma.or(file.gamma),
            delta: self.delta.or(file.delta),
            p_act: self.p_act.or(file.p_act),
            seed: self.seed.or(file.seed),
            samples: self.samples.or(file.samples),
            format: self.format.or(file.format).unwrap_or_default(),
            out: self.out.clone().or(file.out),
        })
    }
}

/// Canonical figure setup used by the figure subcommands for any game
/// parameter left unset.
pub const FIGURE_DEFAULTS: (usize, usize, f64, f64, f64) = (500, 50, 1.0, 5.0, 7.0);

impl Resolved {
    /// `gamma` from `--gamma`, or `beta + delta`.
    pub fn pricing(&self) -> Result<Option<(f64, f64)>> {
        let Some(beta) = self.beta else {
            if self.gamma.is_some() || self.delta.is_some() {
                bail!("--gamma/--delta given without --beta");
            }
            return Ok(None);
        };
        let gamma = match (self.gamma, self.delta) {
            (Some(g), Some(d)) => {
                if (g - (beta + d)).abs() > PRICING_CONSISTENCY {
                    bail!("conflicting pricing: gamma = {g} but beta + delta = {}", beta + d);
                }
                g
            }
            (Some(g), None) => g,
            (None, Some(d)) => beta + d,
            (None, None) => bail!("missing --gamma (or --delta)"),
        };
        Ok(Some((beta, gamma)))
    }

    /// Game from the flags; every parameter except `c_pub` (default 1) is required.
    pub fn game(&self) -> Result<GameConfig> {
        let n = self.n.context("missing --n")?;
        let r = self.r.context("missing --r")?;
        let (beta, gamma) = self.pricing()?.context("missing --beta")?;
        Ok(GameConfig::new(n, r, self.c_pub.unwrap_or(1.0), beta, gamma)?)
    }

    /// Game from the flags with unset parameters taken from [`FIGURE_DEFAULTS`].
    pub fn figure_game(&self) -> Result<GameConfig> {
        let (n, r, c, beta, gamma) = FIGURE_DEFAULTS;
        let (beta, gamma) = self.pricing()?.unwrap_or((beta, gamma));
        Ok(GameConfig::new(
            self.n.unwrap_or(n),
            self.r.unwrap_or(r),
            self.c_pub.unwrap_or(c),
            beta,
            gamma,
        )?)
    }
}
