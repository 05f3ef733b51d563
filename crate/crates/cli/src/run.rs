//! End-to-end run: load, sweep, select, write.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use trendfolio_core::{
    align_volumes, alpha_sweep, buy_and_hold, cumulative_profit_vs, find_max_sharpe,
    find_min_variance, run_backtest, summarize, AlignedPanel64, Alpha64, BacktestResult64,
    PerformanceSummary64, PricePanel64, SweepTable64, TimingMode, VolumePanel64,
};

use crate::config::{RunConfig, VolumeSource};
use crate::error::CliError;
use crate::input::{load_batches, load_benchmark, load_prices, load_volumes};
use crate::output::{render_summary, render_sweep, render_value_path, SummaryLine, ValuePath};
use crate::plot::{sweep_svg, value_paths_svg};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const BENCHMARK_PATH_FILE: &str = "value_path_benchmark.csv";
pub const SWEEP_PLOT_FILE: &str = "sweep.svg";
pub const VALUE_PLOT_FILE: &str = "value_paths.svg";

pub fn sweep_file(mode: TimingMode) -> String {
    format!("sweep_{}.csv", mode.label())
}

pub fn value_path_file(mode: TimingMode) -> String {
    format!("value_path_{}.csv", mode.label())
}

/// Files written and warnings raised by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// `(mode, min-variance alpha, max-Sharpe alpha)`.
    pub selections: Vec<(TimingMode, f64, Option<f64>)>,
}

struct ModeOutcome {
    mode: TimingMode,
    table: SweepTable64,
    path: Option<ValuePath>,
}

fn load_volume_source(
    source: &VolumeSource,
    warnings: &mut Vec<String>,
) -> Result<VolumePanel64, CliError> {
    match source {
        VolumeSource::Merged(path) => load_volumes(path),
        VolumeSource::Batches { paths, reference } => {
            let merged = load_batches(paths, reference)?;
            if !merged.anchor_consistent() {
                warnings.push(format!(
                    "rescaled {reference} series differ from the first batch by up to {} after merging",
                    merged.discrepancy
                ));
            }
            Ok(merged.panel)
        }
    }
}

fn value_path_of(
    prices: &PricePanel64,
    result: &BacktestResult64,
    summary: &PerformanceSummary64,
) -> ValuePath {
    let first = result.weeks[0];
    let base = prices
        .weeks
        .iter()
        .rev()
        .find(|w| w.start_date() < first.start_date())
        .map(|w| w.start_date())
        .unwrap_or(first.start_date());
    let weeks: Vec<NaiveDate> = result.weeks.iter().map(|w| w.start_date()).collect();
    ValuePath::new(base, &weeks, &summary.value_path)
}

fn excess(
    benchmark: Option<&PerformanceSummary64>,
    strategy: &PerformanceSummary64,
    what: &str,
    warnings: &mut Vec<String>,
) -> Option<f64> {
    let b = benchmark?;
    match cumulative_profit_vs(b, strategy) {
        Ok(x) => Some(x),
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            None
        }
    }
}

fn run_mode(
    cfg: &RunConfig,
    panel: &AlignedPanel64,
    mode: TimingMode,
    benchmark: Option<&PerformanceSummary64>,
    lines: &mut Vec<SummaryLine>,
    warnings: &mut Vec<String>,
) -> Result<ModeOutcome, CliError> {
    let table = alpha_sweep(panel, &cfg.grid, mode, cfg.zero_policy, cfg.cost_rate)?;
    for (alpha, reason) in &table.skipped {
        warnings.push(format!("{mode}: alpha {alpha} skipped: {reason}"));
    }

    let (alpha, summary) = find_min_variance(&table)?;
    let label = format!("{mode} min_variance");
    lines.push(SummaryLine::strategy(
        mode,
        "min_variance",
        alpha,
        summary,
        excess(benchmark, summary, &label, warnings),
    ));

    let path = match find_max_sharpe(&table) {
        Ok((alpha, summary)) => {
            let label = format!("{mode} max_sharpe");
            lines.push(SummaryLine::strategy(
                mode,
                "max_sharpe",
                alpha,
                summary,
                excess(benchmark, summary, &label, warnings),
            ));
            let result = run_backtest(
                panel,
                Alpha64::new(alpha)?,
                mode,
                cfg.zero_policy,
                cfg.cost_rate,
            )?;
            Some(value_path_of(&panel.prices, &result, summary))
        }
        Err(e) => {
            warnings.push(format!("{mode}: no max-Sharpe portfolio: {e}"));
            lines.push(SummaryLine {
                series: mode.label().into(),
                selection: "max_sharpe".into(),
                alpha: None,
                summary: None,
                excess_vs_benchmark: None,
            });
            None
        }
    };

    let uniform = summarize(&run_backtest(
        panel,
        Alpha64::uniform(),
        mode,
        cfg.zero_policy,
        cfg.cost_rate,
    )?)?;
    let label = format!("{mode} uniform");
    lines.push(SummaryLine::strategy(
        mode,
        "uniform",
        0.0,
        &uniform,
        excess(benchmark, &uniform, &label, warnings),
    ));

    Ok(ModeOutcome { mode, table, path })
}

/// Output files rendered in memory, keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub selections: Vec<(TimingMode, f64, Option<f64>)>,
}

/// Computes every output file in memory. Nothing touches the disk.
pub fn build(cfg: &RunConfig) -> Result<Rendered, CliError> {
    cfg.validate()?;
    let mut warnings = Vec::new();

    let prices = load_prices(&cfg.prices)?;
    let raw_volumes = load_volume_source(&cfg.volumes, &mut warnings)?;
    let volumes = align_volumes(&raw_volumes, &prices).map_err(|e| match &cfg.volumes {
        VolumeSource::Merged(p) => CliError::data(p, e),
        VolumeSource::Batches { .. } => CliError::Engine(e),
    })?;
    let panel = AlignedPanel64::new(prices, volumes)?;

    let benchmark = match &cfg.benchmark {
        Some(path) => {
            let index = load_benchmark(path, &panel.prices)?;
            let result = buy_and_hold(&index).map_err(|e| CliError::data(path, e))?;
            let summary = summarize(&result).map_err(|e| CliError::data(path, e))?;
            let vp = value_path_of(&index, &result, &summary);
            Some((summary, vp))
        }
        None => None,
    };
    let bench_summary = benchmark.as_ref().map(|b| &b.0);

    let mut lines = Vec::new();
    let mut outcomes = Vec::new();
    for &mode in &cfg.modes {
        outcomes.push(run_mode(
            cfg,
            &panel,
            mode,
            bench_summary,
            &mut lines,
            &mut warnings,
        )?);
    }
    lines.push(match &benchmark {
        Some((s, _)) => SummaryLine {
            series: "benchmark".into(),
            selection: "buy_and_hold".into(),
            alpha: None,
            summary: Some(s.clone()),
            excess_vs_benchmark: Some(0.0),
        },
        None => SummaryLine {
            series: "benchmark".into(),
            selection: "not_provided".into(),
            alpha: None,
            summary: None,
            excess_vs_benchmark: None,
        },
    });

    let mut files = Vec::new();
    for o in &outcomes {
        files.push((sweep_file(o.mode), render_sweep(&o.table)));
        if let Some(p) = &o.path {
            files.push((value_path_file(o.mode), render_value_path(p)));
        }
    }
    if let Some((_, vp)) = &benchmark {
        files.push((BENCHMARK_PATH_FILE.into(), render_value_path(vp)));
    }
    files.push((SUMMARY_FILE.into(), render_summary(&lines)));
    if cfg.plots {
        let tables: Vec<SweepTable64> = outcomes.iter().map(|o| o.table.clone()).collect();
        files.push((SWEEP_PLOT_FILE.into(), sweep_svg(&tables, bench_summary)));
        let paths: Vec<(TimingMode, &ValuePath)> = outcomes
            .iter()
            .filter_map(|o| o.path.as_ref().map(|p| (o.mode, p)))
            .collect();
        files.push((
            VALUE_PLOT_FILE.into(),
            value_paths_svg(&paths, benchmark.as_ref().map(|b| &b.1)),
        ));
    }

    let selections = outcomes
        .iter()
        .map(|o| {
            let min_var = find_min_variance(&o.table)
                .map(|r| r.0)
                .expect("nonempty table");
            (o.mode, min_var, find_max_sharpe(&o.table).ok().map(|r| r.0))
        })
        .collect();
    Ok(Rendered {
        files,
        warnings,
        selections,
    })
}

fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| CliError::io(&target, e))?;
    tmp.persist(&target)
        .map_err(|e| CliError::io(&target, e.error))?;
    Ok(target)
}

/// Runs the whole pipeline and writes the results into `cfg.out_dir`.
/// On error no output file is created.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let Rendered {
        files,
        warnings,
        selections,
    } = build(cfg)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    let written = files
        .iter()
        .map(|(name, content)| write_atomic(&cfg.out_dir, name, content))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport {
        files: written,
        warnings,
        selections,
    })
}
