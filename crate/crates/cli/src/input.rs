//! CSV ingestion for prices, merged volume panels and provider batches.
//!
//! Line numbers in errors are 1-based file lines, header included.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use trendfolio_core::{
    align_to_weeks, calendar_spanning, merge_batches, AssetId, Error, MergedVolumePanel64,
    PricePanel64, QueryBatch64, VolumePanel64, WeekId,
};

use crate::error::CliError;

fn open(path: &Path) -> Result<csv::Reader<File>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn headers(path: &Path, reader: &mut csv::Reader<File>) -> Result<Vec<String>, CliError> {
    let h = reader
        .headers()
        .map_err(|e| CliError::parse(path, 1, e.to_string()))?;
    Ok(h.iter().map(str::to_owned).collect())
}

fn expect_header(path: &Path, found: &[String], expected: &[&str]) -> Result<(), CliError> {
    if found != expected {
        return Err(CliError::parse(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

fn records(
    path: &Path,
    reader: &mut csv::Reader<File>,
) -> Result<Vec<(u64, csv::StringRecord)>, CliError> {
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec));
    }
    Ok(out)
}

fn parse_date(path: &Path, line: u64, s: &str) -> Result<NaiveDate, CliError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| {
        CliError::parse(
            path,
            line,
            format!("invalid date {s:?}, expected YYYY-MM-DD"),
        )
    })
}

fn parse_sunday(path: &Path, line: u64, s: &str) -> Result<NaiveDate, CliError> {
    let d = parse_date(path, line, s)?;
    if d.weekday() != Weekday::Sun {
        return Err(CliError::parse(
            path,
            line,
            format!(
                "week_start {d} is a {:?}, weeks start on Sunday",
                d.weekday()
            ),
        ));
    }
    Ok(d)
}

fn parse_ticker(path: &Path, line: u64, s: &str) -> Result<AssetId, CliError> {
    AssetId::new(s).map_err(|e| CliError::parse(path, line, e.to_string()))
}

fn parse_number(path: &Path, line: u64, what: &str, s: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::parse(path, line, format!("{what} {s:?} is not a finite number")))
}

/// Reads `date,ticker,close` rows without aligning them.
pub fn read_price_records(path: &Path) -> Result<Vec<(NaiveDate, AssetId, f64)>, CliError> {
    let mut reader = open(path)?;
    let h = headers(path, &mut reader)?;
    expect_header(path, &h, &["date", "ticker", "close"])?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, rec) in records(path, &mut reader)? {
        let date = parse_date(path, line, &rec[0])?;
        let ticker = parse_ticker(path, line, &rec[1])?;
        let close = parse_number(path, line, "close", &rec[2])?;
        if close <= 0.0 {
            return Err(CliError::parse(
                path,
                line,
                format!("close {close} is not positive"),
            ));
        }
        if !seen.insert((date, ticker.clone())) {
            return Err(CliError::parse(
                path,
                line,
                format!("second observation for {ticker} on {date}"),
            ));
        }
        out.push((date, ticker, close));
    }
    if out.is_empty() {
        return Err(CliError::parse(path, 1, "no observations"));
    }
    Ok(out)
}

/// Loads a price file and collapses it to weekly closes.
pub fn load_prices(path: &Path) -> Result<PricePanel64, CliError> {
    let recs = read_price_records(path)?;
    let (first, last) = date_range(&recs);
    align_to_weeks(&recs, &calendar_spanning(first, last)).map_err(|e| CliError::data(path, e))
}

fn date_range(recs: &[(NaiveDate, AssetId, f64)]) -> (NaiveDate, NaiveDate) {
    let first = recs.iter().map(|r| r.0).min().expect("nonempty");
    let last = recs.iter().map(|r| r.0).max().expect("nonempty");
    (first, last)
}

/// Loads a single-series benchmark onto the week calendar of `prices`.
pub fn load_benchmark(path: &Path, prices: &PricePanel64) -> Result<PricePanel64, CliError> {
    let recs = read_price_records(path)?;
    let tickers: BTreeSet<&AssetId> = recs.iter().map(|r| &r.1).collect();
    if tickers.len() != 1 {
        return Err(CliError::data(
            path,
            Error::InvalidParameter(format!(
                "benchmark file holds {} tickers, expected 1",
                tickers.len()
            )),
        ));
    }
    let first = prices.weeks[0].start_date();
    let last = prices.weeks[prices.weeks.len() - 1].end_date();
    let in_span: Vec<_> = recs
        .into_iter()
        .filter(|r| r.0 >= first && r.0 <= last)
        .collect();
    if in_span.is_empty() {
        return Err(CliError::data(
            path,
            Error::InsufficientData {
                what: "benchmark observations inside the price calendar",
                needed: 1,
                got: 0,
            },
        ));
    }
    let weekly = align_to_weeks(&in_span, &calendar_spanning(first, last))
        .map_err(|e| CliError::data(path, e))?;

    let by_date: HashMap<NaiveDate, f64> = weekly
        .weeks
        .iter()
        .zip(&weekly.close[0])
        .map(|(w, c)| (w.start_date(), *c))
        .collect();
    let mut close = Vec::with_capacity(prices.n_weeks());
    let mut gaps = Vec::new();
    for w in &prices.weeks {
        match by_date.get(&w.start_date()) {
            Some(c) => close.push(*c),
            None => gaps.push((weekly.assets[0].clone(), *w)),
        }
    }
    if !gaps.is_empty() {
        return Err(CliError::data(path, Error::PriceGaps(gaps)));
    }
    PricePanel64::new(weekly.assets.to_vec(), prices.weeks.clone(), vec![close])
        .map_err(|e| CliError::data(path, e))
}

/// Loads a long-format `week_start,ticker,volume` panel.
pub fn load_volumes(path: &Path) -> Result<VolumePanel64, CliError> {
    let mut reader = open(path)?;
    let h = headers(path, &mut reader)?;
    expect_header(path, &h, &["week_start", "ticker", "volume"])?;

    let mut assets: Vec<AssetId> = Vec::new();
    let mut cells: HashMap<(AssetId, NaiveDate), f64> = HashMap::new();
    let mut dates = BTreeSet::new();
    for (line, rec) in records(path, &mut reader)? {
        let week = parse_sunday(path, line, &rec[0])?;
        let ticker = parse_ticker(path, line, &rec[1])?;
        let volume = parse_number(path, line, "volume", &rec[2])?;
        if volume < 0.0 {
            return Err(CliError::parse(
                path,
                line,
                format!("volume {volume} is negative"),
            ));
        }
        if !assets.contains(&ticker) {
            assets.push(ticker.clone());
        }
        dates.insert(week);
        if cells.insert((ticker.clone(), week), volume).is_some() {
            return Err(CliError::parse(
                path,
                line,
                format!("second volume for {ticker} in week {week}"),
            ));
        }
    }
    if assets.is_empty() {
        return Err(CliError::parse(path, 1, "no observations"));
    }

    let weeks = dates
        .iter()
        .enumerate()
        .map(|(k, d)| WeekId::new(*d, k))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::data(path, e))?;
    let mut gaps = Vec::new();
    let volume = assets
        .iter()
        .map(|a| {
            weeks
                .iter()
                .map(|w| {
                    cells
                        .get(&(a.clone(), w.start_date()))
                        .copied()
                        .unwrap_or_else(|| {
                            gaps.push((a.clone(), *w));
                            f64::NAN
                        })
                })
                .collect()
        })
        .collect();
    if !gaps.is_empty() {
        return Err(CliError::data(path, Error::VolumeGaps(gaps)));
    }
    VolumePanel64::new(assets, weeks, volume).map_err(|e| CliError::data(path, e))
}

/// Reads one wide provider export `week_start,<t1>,...,<tK>`.
pub fn load_batch(path: &Path, reference: &AssetId) -> Result<QueryBatch64, CliError> {
    let mut reader = open(path)?;
    let h = headers(path, &mut reader)?;
    if h.first().map(String::as_str) != Some("week_start") || h.len() < 3 {
        return Err(CliError::parse(
            path,
            1,
            "expected header `week_start,<ticker>,...` with at least two tickers",
        ));
    }
    let tickers = h[1..]
        .iter()
        .map(|t| parse_ticker(path, 1, t))
        .collect::<Result<Vec<_>, _>>()?;
    if !tickers.contains(reference) {
        return Err(CliError::data(
            path,
            Error::InvalidBatch(format!("reference {reference} missing from batch")),
        ));
    }

    let mut weeks: Vec<WeekId> = Vec::new();
    let mut columns = vec![Vec::new(); tickers.len()];
    for (line, rec) in records(path, &mut reader)? {
        let date = parse_sunday(path, line, &rec[0])?;
        if weeks.last().is_some_and(|w| w.start_date() >= date) {
            return Err(CliError::parse(
                path,
                line,
                format!("week {date} out of order"),
            ));
        }
        weeks.push(WeekId::new(date, weeks.len()).map_err(|e| CliError::data(path, e))?);
        for (k, col) in columns.iter_mut().enumerate() {
            let v = parse_number(path, line, "volume", &rec[k + 1])?;
            if !(0.0..=100.0).contains(&v) || v.fract() != 0.0 {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("volume {v} for {} is not an integer in 0-100", tickers[k]),
                ));
            }
            col.push(v);
        }
    }
    let batch = QueryBatch64::new(
        weeks,
        tickers.into_iter().zip(columns).collect(),
        reference.clone(),
    )
    .map_err(|e| CliError::data(path, e))?;
    if !batch.is_provider_scaled() {
        return Err(CliError::data(
            path,
            Error::InvalidBatch(format!(
                "batch maximum is {}, expected 100",
                batch.max_volume()
            )),
        ));
    }
    Ok(batch)
}

/// Loads every batch file and merges them through `reference`.
pub fn load_batches(
    paths: &[PathBuf],
    reference: &AssetId,
) -> Result<MergedVolumePanel64, CliError> {
    let batches = paths
        .iter()
        .map(|p| load_batch(p, reference))
        .collect::<Result<Vec<_>, _>>()?;
    merge_batches(&batches, reference).map_err(|e| {
        let batch = match &e {
            Error::BatchStructure { batch, .. }
            | Error::UnmergeableBatch { batch, .. }
            | Error::BatchCalendar { batch } => Some(*batch),
            _ => None,
        };
        match batch.and_then(|b| paths.get(b)) {
            Some(p) => CliError::data(p, e),
            None => CliError::Engine(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn prices_two_assets() {
        let f = file(
            "date,ticker,close\n\
             2024-01-08,AAA,10\n2024-01-12,AAA,11\n2024-01-12,BBB,20\n\
             2024-01-19,AAA,12\n2024-01-19,BBB,21\n",
        );
        let p = load_prices(f.path()).unwrap();
        assert_eq!(p.n_assets(), 2);
        assert_eq!(p.close, vec![vec![11.0, 12.0], vec![20.0, 21.0]]);
    }

    #[test]
    fn negative_price_cites_its_line() {
        let mut content = String::from("date,ticker,close\n");
        for k in 0..15 {
            content.push_str(&format!("2024-01-{:02},AAA,10\n", k + 1));
        }
        content.push_str("2024-01-16,AAA,-3\n");
        let f = file(&content);
        let err = load_prices(f.path()).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 17, .. }), "{err}");
        assert!(err.to_string().contains(":17:"));
    }

    #[test]
    fn bad_header_and_fields() {
        assert!(matches!(
            load_prices(file("day,ticker,close\n2024-01-08,A,1\n").path()),
            Err(CliError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_prices(file("date,ticker,close\n2024-13-08,A,1\n").path()),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_prices(file("date,ticker,close\n2024-01-08,A,abc\n").path()),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_prices(file("date,ticker,close\n2024-01-08,A,1\n2024-01-08,A,2\n").path()),
            Err(CliError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn merged_volumes() {
        let f = file(
            "week_start,ticker,volume\n\
             2024-01-07,AAA,10\n2024-01-07,BBB,0\n2024-01-14,BBB,3\n2024-01-14,AAA,4\n",
        );
        let v = load_volumes(f.path()).unwrap();
        assert_eq!(v.volume, vec![vec![10.0, 4.0], vec![0.0, 3.0]]);

        let gap = file("week_start,ticker,volume\n2024-01-07,AAA,10\n2024-01-14,BBB,3\n");
        assert!(matches!(
            load_volumes(gap.path()),
            Err(CliError::Data {
                source: Error::VolumeGaps(_),
                ..
            })
        ));
        let monday = file("week_start,ticker,volume\n2024-01-08,AAA,10\n");
        assert!(matches!(
            load_volumes(monday.path()),
            Err(CliError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn batches_merge_and_name_files() {
        let reference = AssetId::new("REF").unwrap();
        let a = file("week_start,REF,XA\n2024-01-07,50,100\n2024-01-14,100,20\n");
        let b = file("week_start,XB,REF\n2024-01-07,100,25\n2024-01-14,40,50\n");
        let merged = load_batches(&[a.path().into(), b.path().into()], &reference).unwrap();
        assert_eq!(merged.batch_scales, vec![1.0, 2.0]);
        assert_eq!(merged.panel.volume[2], vec![200.0, 80.0]);

        let missing = file("week_start,XC,XD\n2024-01-07,100,25\n2024-01-14,40,50\n");
        let err = load_batches(&[a.path().into(), missing.path().into()], &reference).unwrap_err();
        match &err {
            CliError::Data { path, .. } => assert_eq!(path, missing.path()),
            other => panic!("unexpected {other}"),
        }
        assert!(err.to_string().contains("REF"));

        let shifted = file("week_start,XB,REF\n2024-01-14,100,25\n2024-01-21,40,50\n");
        match load_batches(&[a.path().into(), shifted.path().into()], &reference).unwrap_err() {
            CliError::Data { path, source } => {
                assert_eq!(path, shifted.path());
                assert_eq!(source, Error::BatchCalendar { batch: 1 });
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn batch_values_are_provider_integers() {
        let reference = AssetId::new("REF").unwrap();
        let frac = file("week_start,REF,XA\n2024-01-07,50.5,100\n");
        assert!(matches!(
            load_batch(frac.path(), &reference),
            Err(CliError::Parse { line: 2, .. })
        ));
        let big = file("week_start,REF,XA\n2024-01-07,50,140\n");
        assert!(matches!(
            load_batch(big.path(), &reference),
            Err(CliError::Parse { line: 2, .. })
        ));
        let unscaled = file("week_start,REF,XA\n2024-01-07,50,60\n");
        assert!(matches!(
            load_batch(unscaled.path(), &reference),
            Err(CliError::Data { .. })
        ));
    }
}
