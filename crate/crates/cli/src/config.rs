use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "abot", version, about = "Anisotropic branched transport tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Solve a transport problem (network.json, metrics.csv, network.svg).
    Solve,
    /// Decompose a symmetric polygon into direction weights.
    IgDecompose,
    /// Approximate a planar gauge by polygons and a direction measure.
    IgApproximate,
    /// Search for a violated hypermetric inequality.
    Hypermetric,
    /// Compare direct and sliced H-masses of planar currents.
    VerifySlicing,
    /// Lower semicontinuity experiment on staircase-type sequences.
    LscExperiment,
    /// Flat distance between two currents.
    Flatnorm,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    Solve(CommonArgs),
    IgDecompose(CommonArgs),
    IgApproximate(CommonArgs),
    Hypermetric(CommonArgs),
    VerifySlicing(CommonArgs),
    LscExperiment(CommonArgs),
    Flatnorm(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Local,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long)]
    pub max_steiner: Option<usize>,
    /// Cap on optimised topologies; hitting it exits with status 4.
    #[arg(long)]
    pub max_evaluations: Option<usize>,
    /// Steiner candidates for the brute-force oracle, e.g. `5x5`.
    #[arg(long)]
    pub oracle_grid: Option<GridSpec>,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// `var=from:to:step` with `var` one of `h`, `alpha`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected GxG, got {s:?}"))?;
        let nx: usize = a.trim().parse().map_err(|_| format!("bad grid width {a:?}"))?;
        let ny: usize = b.trim().parse().map_err(|_| format!("bad grid height {b:?}"))?;
        if nx < 1 || ny < 1 {
            return Err("grid needs at least one point per side".into());
        }
        Ok(Self { nx, ny })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    /// Height of the targets (their last coordinate).
    H,
    /// Exponent of a power-law branching function.
    Alpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Sweep {
    /// Grid values `from + i·step ≤ to` (with a little slack for rounding).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.from + i as f64 * self.step).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (var, range) = s.split_once('=').ok_or("expected var=from:to:step")?;
        let var = match var.trim() {
            "h" => SweepVar::H,
            "alpha" => SweepVar::Alpha,
            other => return Err(format!("unknown sweep variable {other:?}")),
        };
        let parts: Vec<f64> = range
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
            .collect::<Result<_, _>>()?;
        let [from, to, step] = parts[..] else {
            return Err("expected from:to:step".into());
        };
        if !(step > 0.0 && to >= from && from.is_finite() && to.is_finite()) {
            return Err("sweep needs from <= to and step > 0".into());
        }
        Ok(Self { var, from, to, step })
    }
}

/// Named tolerances with documented defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let defaults = [
            // Relative gap allowed between direct and sliced H-mass.
            ("slicing", 1e-8),
            // Absolute error of polygon-norm reconstruction.
            ("reconstruction", 1e-9),
            // Slack in the liminf inequality of the lsc experiment.
            ("lsc", 1e-9),
            // Allowed excess of solver cost over the oracle.
            ("oracle", 1e-6),
            // Bisection resolution of the sweep crossover.
            ("crossover", 1e-4),
        ];
        Self(defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, spec: &str) -> Result<(), CliError> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VALUE, got {spec:?}")))?;
        let slot = self
            .0
            .get_mut(k.trim())
            .ok_or_else(|| CliError::Usage(format!("unknown tolerance {k:?}")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad tolerance value {v:?}")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(CliError::Usage(format!("tolerance {k} must be finite and >= 0")));
        }
        *slot = value;
        Ok(())
    }
}

/// Everything one command run depends on.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    // paths are left out of echoed configs so outputs do not depend on them
    #[serde(skip)]
    pub input: PathBuf,
    #[serde(skip)]
    pub out: PathBuf,
    pub seed: u64,
    pub mode: Mode,
    pub max_steiner: Option<usize>,
    pub max_evaluations: Option<usize>,
    pub oracle_grid: Option<GridSpec>,
    pub depth: usize,
    pub sweep: Option<Sweep>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(command: CommandKind, input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: input.into(),
            out: out.into(),
            seed: 0,
            mode: Mode::Exhaustive,
            max_steiner: None,
            max_evaluations: None,
            oracle_grid: None,
            depth: 12,
            sweep: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_args(command: CommandKind, a: CommonArgs) -> Result<Self, CliError> {
        let mut tolerances = Tolerances::default();
        for t in &a.tol {
            tolerances.set(t)?;
        }
        Ok(Self {
            command,
            input: a.input,
            out: a.out,
            seed: a.seed,
            mode: a.mode,
            max_steiner: a.max_steiner,
            max_evaluations: a.max_evaluations,
            oracle_grid: a.oracle_grid,
            depth: a.depth,
            sweep: a.sweep,
            tolerances,
        })
    }
}

impl Command {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (kind, args) = match self {
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::IgDecompose(a) => (CommandKind::IgDecompose, a),
            Command::IgApproximate(a) => (CommandKind::IgApproximate, a),
            Command::Hypermetric(a) => (CommandKind::Hypermetric, a),
            Command::VerifySlicing(a) => (CommandKind::VerifySlicing, a),
            Command::LscExperiment(a) => (CommandKind::LscExperiment, a),
            Command::Flatnorm(a) => (CommandKind::Flatnorm, a),
        };
        RunConfig::from_args(kind, args)
    }
}

/// Reads and parses a JSON input, reporting syntax and schema errors with
/// their line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}
