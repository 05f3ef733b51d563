//! Command-line flags and the validated run configuration.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use trendfolio_core::{AlphaGrid64, AssetId, TimingMode, ZeroPolicy64};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Weights from the same week's volumes.
    In,
    /// Weights from the previous week's volumes.
    Oos,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> Vec<TimingMode> {
        match self {
            ModeArg::In => vec![TimingMode::InSample],
            ModeArg::Oos => vec![TimingMode::OutOfSample],
            ModeArg::Both => TimingMode::ALL.to_vec(),
        }
    }
}

/// `exclude` or `floor:F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPolicyArg(pub ZeroPolicy64);

impl FromStr for ZeroPolicyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exclude" {
            return Ok(Self(ZeroPolicy64::Exclude));
        }
        let value = s
            .strip_prefix("floor:")
            .ok_or_else(|| format!("expected `exclude` or `floor:F`, got {s:?}"))?;
        let f: f64 = value
            .parse()
            .map_err(|_| format!("floor value {value:?} is not a number"))?;
        ZeroPolicy64::floor(f).map(Self).map_err(|e| e.to_string())
    }
}

/// Backtest search-volume weighted portfolios over a grid of alpha values.
#[derive(Debug, Clone, Parser)]
#[command(name = "trendfolio", version)]
pub struct Args {
    /// Price file with header `date,ticker,close`.
    #[arg(long, value_name = "PATH")]
    pub prices: PathBuf,

    /// Merged volume file with header `week_start,ticker,volume`.
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "batches",
        required_unless_present = "batches"
    )]
    pub volumes: Option<PathBuf>,

    /// Provider batch files with header `week_start,<ticker>...`.
    #[arg(long, value_name = "PATH", num_args = 1.., requires = "reference")]
    pub batches: Vec<PathBuf>,

    /// Ticker present in every batch, used to chain batch scales.
    #[arg(long, value_name = "TICKER", requires = "batches")]
    pub reference: Option<String>,

    /// Benchmark index price file, same format as --prices, one ticker.
    #[arg(long, value_name = "PATH")]
    pub benchmark: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,

    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true, value_name = "R")]
    pub alpha_min: f64,

    #[arg(
        long,
        default_value_t = 2.0,
        allow_hyphen_values = true,
        value_name = "R"
    )]
    pub alpha_max: f64,

    #[arg(long, default_value_t = 0.1, value_name = "R")]
    pub alpha_step: f64,

    /// `exclude` drops zero-volume assets for that week; `floor:F` replaces zeros by F.
    #[arg(long, default_value = "exclude", value_name = "POLICY")]
    pub zero_policy: ZeroPolicyArg,

    /// Proportional fee per unit of turnover.
    #[arg(long, default_value_t = 0.0, value_name = "R")]
    pub cost_rate: f64,

    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Also write SVG plots.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VolumeSource {
    Merged(PathBuf),
    Batches {
        paths: Vec<PathBuf>,
        reference: AssetId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prices: PathBuf,
    pub volumes: VolumeSource,
    pub benchmark: Option<PathBuf>,
    pub modes: Vec<TimingMode>,
    pub grid: AlphaGrid64,
    pub zero_policy: ZeroPolicy64,
    pub cost_rate: f64,
    pub out_dir: PathBuf,
    pub plots: bool,
}

impl RunConfig {
    /// Defaults: both modes, alpha from -2 to 2 by 0.1, no costs.
    pub fn new(prices: PathBuf, volumes: VolumeSource, out_dir: PathBuf) -> Self {
        Self {
            prices,
            volumes,
            benchmark: None,
            modes: TimingMode::ALL.to_vec(),
            grid: AlphaGrid64::default(),
            zero_policy: ZeroPolicy64::Exclude,
            cost_rate: 0.0,
            out_dir,
            plots: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let empty = |p: &PathBuf| p.as_os_str().is_empty();
        if empty(&self.prices) || empty(&self.out_dir) || self.benchmark.as_ref().is_some_and(empty)
        {
            return Err(CliError::Config("paths must be nonempty".into()));
        }
        match &self.volumes {
            VolumeSource::Merged(p) if empty(p) => {
                return Err(CliError::Config("volume path is empty".into()))
            }
            VolumeSource::Batches { paths, .. } if paths.is_empty() || paths.iter().any(empty) => {
                return Err(CliError::Config("batch list is empty".into()))
            }
            _ => {}
        }
        if self.modes.is_empty() {
            return Err(CliError::Config("no timing mode selected".into()));
        }
        if !(self.cost_rate.is_finite() && self.cost_rate >= 0.0) {
            return Err(CliError::Config(format!(
                "cost rate must be nonnegative, got {}",
                self.cost_rate
            )));
        }
        Ok(())
    }
}

impl TryFrom<Args> for RunConfig {
    type Error = CliError;

    fn try_from(args: Args) -> Result<Self, CliError> {
        let volumes = match (args.volumes, args.reference) {
            (Some(path), _) => VolumeSource::Merged(path),
            (None, Some(reference)) => VolumeSource::Batches {
                paths: args.batches,
                reference: AssetId::new(&reference).map_err(|e| CliError::Config(e.to_string()))?,
            },
            (None, None) => {
                return Err(CliError::Config(
                    "either --volumes or --batches with --reference is required".into(),
                ))
            }
        };
        let grid = AlphaGrid64::new(args.alpha_min, args.alpha_max, args.alpha_step)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let config = RunConfig {
            prices: args.prices,
            volumes,
            benchmark: args.benchmark,
            modes: args.mode.modes(),
            grid,
            zero_policy: args.zero_policy.0,
            cost_rate: args.cost_rate,
            out_dir: args.out,
            plots: args.plots,
        };
        config.validate()?;
        Ok(config)
    }
}
