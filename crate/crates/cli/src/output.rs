//! Result tables: rendering to CSV text and parsing back.
//!
//! Numbers carry 10 significant digits. Rendering is pure so a run can
//! build every file before touching the output directory.

use std::cmp::Ordering;
use std::path::Path;

use chrono::NaiveDate;
use trendfolio_core::{PerformanceSummary64, SweepTable64, TimingMode};

use crate::error::CliError;

pub const SWEEP_HEADER: [&str; 7] = [
    "alpha",
    "mean",
    "std",
    "sharpe",
    "cumulative_profit",
    "n_weeks",
    "skipped_reason",
];

pub const SUMMARY_HEADER: [&str; 9] = [
    "series",
    "selection",
    "alpha",
    "mean",
    "std",
    "sharpe",
    "cumulative_profit",
    "n_weeks",
    "excess_vs_benchmark",
];

pub const VALUE_PATH_HEADER: [&str; 2] = ["week_start", "value"];

pub const SHARPE_UNDEFINED: &str = "sharpe undefined";

/// Formats `x` with 10 significant digits, positional for moderate
/// magnitudes and scientific otherwise, without trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer");
    String::from_utf8(bytes).expect("utf-8 fields")
}

fn summary_fields(s: &PerformanceSummary64) -> [String; 5] {
    [
        fmt_num(s.mean_return),
        fmt_num(s.std_dev),
        s.sharpe.map(fmt_num).unwrap_or_default(),
        fmt_num(s.cumulative_profit),
        s.n_weeks.to_string(),
    ]
}

/// One line per grid point, successful and skipped rows merged in alpha order.
pub fn render_sweep(table: &SweepTable64) -> String {
    let mut lines: Vec<(f64, Vec<String>)> = Vec::new();
    for row in &table.rows {
        let mut rec = vec![fmt_num(row.alpha)];
        rec.extend(summary_fields(&row.summary));
        rec.push(if row.summary.sharpe.is_none() {
            SHARPE_UNDEFINED.into()
        } else {
            String::new()
        });
        lines.push((row.alpha, rec));
    }
    for (alpha, reason) in &table.skipped {
        let mut rec = vec![fmt_num(*alpha)];
        rec.extend(std::iter::repeat_n(String::new(), 5));
        rec.push(reason.clone());
        lines.push((*alpha, rec));
    }
    lines.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    let mut w = writer();
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for (_, rec) in lines {
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

/// Compounded value path with its week labels; the first point is the 1.0 base.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuePath {
    pub weeks: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl ValuePath {
    /// `base_week` labels the starting value; `weeks` label the compounded values.
    pub fn new(base_week: NaiveDate, weeks: &[NaiveDate], path: &[f64]) -> Self {
        debug_assert_eq!(weeks.len(), path.len());
        Self {
            weeks: std::iter::once(base_week)
                .chain(weeks.iter().copied())
                .collect(),
            values: std::iter::once(1.0).chain(path.iter().copied()).collect(),
        }
    }
}

pub fn render_value_path(path: &ValuePath) -> String {
    let mut w = writer();
    w.write_record(VALUE_PATH_HEADER).expect("in-memory write");
    for (week, value) in path.weeks.iter().zip(&path.values) {
        w.write_record([week.to_string(), fmt_num(*value)])
            .expect("in-memory write");
    }
    finish(w)
}

/// One row of the summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub series: String,
    pub selection: String,
    pub alpha: Option<f64>,
    pub summary: Option<PerformanceSummary64>,
    pub excess_vs_benchmark: Option<f64>,
}

impl SummaryLine {
    pub fn strategy(
        mode: TimingMode,
        selection: &str,
        alpha: f64,
        summary: &PerformanceSummary64,
        excess: Option<f64>,
    ) -> Self {
        Self {
            series: mode.label().into(),
            selection: selection.into(),
            alpha: Some(alpha),
            summary: Some(summary.clone()),
            excess_vs_benchmark: excess,
        }
    }
}

pub fn render_summary(lines: &[SummaryLine]) -> String {
    let mut w = writer();
    w.write_record(SUMMARY_HEADER).expect("in-memory write");
    for line in lines {
        let mut rec = vec![
            line.series.clone(),
            line.selection.clone(),
            line.alpha.map(fmt_num).unwrap_or_default(),
        ];
        match &line.summary {
            Some(s) => rec.extend(summary_fields(s)),
            None => rec.extend(std::iter::repeat_n(String::new(), 5)),
        }
        rec.push(line.excess_vs_benchmark.map(fmt_num).unwrap_or_default());
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

/// A sweep table row as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSweepRow {
    pub alpha: f64,
    pub std: Option<f64>,
    pub sharpe: Option<f64>,
    pub skipped_reason: String,
}

/// A summary row as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSummaryRow {
    pub series: String,
    pub selection: String,
    pub alpha: Option<f64>,
}

fn parse_reader(
    path: &Path,
    text: &str,
    header: &[&str],
) -> Result<Vec<(u64, csv::StringRecord)>, CliError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let found = r
        .headers()
        .map_err(|e| CliError::parse(path, 1, e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::parse(path, 1, "unexpected header"));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| CliError::parse(path, 0, e.to_string()))?;
            Ok((rec.position().map_or(0, |p| p.line()), rec))
        })
        .collect()
}

fn opt_num(path: &Path, line: u64, s: &str) -> Result<Option<f64>, CliError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| CliError::parse(path, line, format!("not a number: {s:?}")))
}

pub fn parse_sweep(path: &Path, text: &str) -> Result<Vec<ParsedSweepRow>, CliError> {
    parse_reader(path, text, &SWEEP_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(ParsedSweepRow {
                alpha: opt_num(path, line, &rec[0])?
                    .ok_or_else(|| CliError::parse(path, line, "missing alpha"))?,
                std: opt_num(path, line, &rec[2])?,
                sharpe: opt_num(path, line, &rec[3])?,
                skipped_reason: rec[6].to_string(),
            })
        })
        .collect()
}

pub fn parse_summary(path: &Path, text: &str) -> Result<Vec<ParsedSummaryRow>, CliError> {
    parse_reader(path, text, &SUMMARY_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(ParsedSummaryRow {
                series: rec[0].to_string(),
                selection: rec[1].to_string(),
                alpha: opt_num(path, line, &rec[2])?,
            })
        })
        .collect()
}

fn closer_to_zero(a: f64, b: f64) -> bool {
    (a.abs(), a) < (b.abs(), b)
}

fn pick(rows: impl Iterator<Item = (f64, f64)>, better: Ordering) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for (alpha, score) in rows {
        let take = match best {
            None => true,
            Some((b_alpha, b_score)) => match score.partial_cmp(&b_score) {
                Some(Ordering::Equal) => closer_to_zero(alpha, b_alpha),
                Some(o) => o == better,
                None => false,
            },
        };
        if take {
            best = Some((alpha, score));
        }
    }
    best.map(|b| b.0)
}

/// Alpha of the smallest `std` among parsed rows, same tie rule as the engine.
pub fn reselect_min_variance(rows: &[ParsedSweepRow]) -> Option<f64> {
    pick(
        rows.iter().filter_map(|r| r.std.map(|s| (r.alpha, s))),
        Ordering::Less,
    )
}

/// Alpha of the largest Sharpe ratio among parsed rows.
pub fn reselect_max_sharpe(rows: &[ParsedSweepRow]) -> Option<f64> {
    pick(
        rows.iter().filter_map(|r| r.sharpe.map(|s| (r.alpha, s))),
        Ordering::Greater,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.30000000000000004), "0.3");
        assert_eq!(fmt_num(-1.7), "-1.7");
        assert_eq!(fmt_num(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_num(123456.789012345), "123456.789");
        assert_eq!(fmt_num(0.000123456789012), "0.000123456789");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(2.0e12), "2e12");
        assert_eq!(fmt_num(9.99999999996), "10");
    }

    #[test]
    fn formatted_values_parse_within_precision() {
        for x in [0.0123456789123, -4.56e-9, 7.0e11, 1.0 - 1e-13, 0.02] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-10 * x.abs(), "{x} -> {back}");
        }
    }

    #[test]
    fn reselection_tie_rule() {
        let row = |alpha, std, sharpe| ParsedSweepRow {
            alpha,
            std: Some(std),
            sharpe,
            skipped_reason: String::new(),
        };
        let rows = vec![
            row(-0.5, 1.0, Some(2.0)),
            row(0.5, 1.0, Some(2.0)),
            row(-0.4, 1.0, None),
            row(1.0, 3.0, Some(1.0)),
        ];
        assert_eq!(reselect_min_variance(&rows), Some(-0.4));
        assert_eq!(reselect_max_sharpe(&rows), Some(-0.5));
        assert_eq!(reselect_max_sharpe(&rows[2..3]), None);
    }
}
