//! Seeded synthetic datasets and their CSV renderings.

use std::fmt::Write as _;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// First Sunday used by every fixture calendar.
pub fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2005, 1, 2).expect("valid date")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal draw (Box-Muller).
pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Weekly prices and volumes over a contiguous Sunday calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPanel {
    pub tickers: Vec<String>,
    pub first_week: NaiveDate,
    pub prices: Vec<Vec<f64>>,
    pub volumes: Vec<Vec<f64>>,
}

impl RawPanel {
    pub fn n_assets(&self) -> usize {
        self.tickers.len()
    }

    pub fn n_weeks(&self) -> usize {
        self.prices[0].len()
    }

    pub fn week_start(&self, t: usize) -> NaiveDate {
        self.first_week + Days::new(7 * t as u64)
    }

    /// Equal-weight buy-and-hold index of the panel's assets, starting at 100.
    pub fn index_levels(&self) -> Vec<f64> {
        (0..self.n_weeks())
            .map(|t| {
                let rel: f64 = self.prices.iter().map(|row| row[t] / row[0]).sum();
                100.0 * rel / self.n_assets() as f64
            })
            .collect()
    }
}

pub fn tickers(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("A{i:02}")).collect()
}

fn walk(rng: &mut impl Rng, n_weeks: usize, drift: f64, vol: f64) -> Vec<f64> {
    let mut p = 50.0 + 100.0 * rng.gen::<f64>();
    let mut out = Vec::with_capacity(n_weeks);
    for _ in 0..n_weeks {
        out.push(p);
        p *= (1.0 + drift + vol * normal(rng)).max(0.2);
    }
    out
}

/// Random-walk prices with volumes uniform in `[1, 100]`.
pub fn random_panel(rng: &mut impl Rng, n_assets: usize, n_weeks: usize) -> RawPanel {
    let prices = (0..n_assets)
        .map(|_| {
            let vol = rng.gen_range(0.01..0.06);
            walk(rng, n_weeks, 0.001, vol)
        })
        .collect();
    let volumes = (0..n_assets)
        .map(|_| (0..n_weeks).map(|_| rng.gen_range(1.0..100.0)).collect())
        .collect();
    RawPanel {
        tickers: tickers(n_assets),
        first_week: epoch(),
        prices,
        volumes,
    }
}

/// Panel whose popular assets are also the volatile ones: each asset's
/// volume level and return volatility both grow with its rank.
pub fn synthetic_panel(seed: u64, n_assets: usize, n_weeks: usize) -> RawPanel {
    let mut rng = rng(seed);
    let mut prices = Vec::with_capacity(n_assets);
    let mut volumes = Vec::with_capacity(n_assets);
    for i in 0..n_assets {
        let rank = (i + 1) as f64 / n_assets as f64;
        prices.push(walk(&mut rng, n_weeks, 0.0015, 0.015 + 0.03 * rank));
        let level = 5.0 + 90.0 * rank;
        volumes.push(
            (0..n_weeks)
                .map(|_| (level * (0.8 + 0.4 * rng.gen::<f64>())).round().max(1.0))
                .collect(),
        );
    }
    RawPanel {
        tickers: tickers(n_assets),
        first_week: epoch(),
        prices,
        volumes,
    }
}

/// Five assets, 400 weeks. Asset 0 is searched five times as often as the
/// others every week and its returns are three times as volatile; the other
/// four share identical volume series. All returns are independent.
pub fn risk_reduction_panel(seed: u64) -> RawPanel {
    const WEEKS: usize = 400;
    let mut rng = rng(seed);
    let mut prices = Vec::new();
    for i in 0..5 {
        let sigma = if i == 0 { 0.03 } else { 0.01 };
        let mut p = 100.0;
        let mut row = Vec::with_capacity(WEEKS);
        for _ in 0..WEEKS {
            row.push(p);
            p *= 1.0 + 0.002 + sigma * normal(&mut rng);
        }
        prices.push(row);
    }
    let base: Vec<f64> = (0..WEEKS)
        .map(|t| (12.0 + 6.0 * (t as f64 / 9.0).sin() + 2.0 * rng.gen::<f64>()).round())
        .collect();
    let mut volumes = vec![base.iter().map(|b| 5.0 * b).collect::<Vec<f64>>()];
    for _ in 1..5 {
        volumes.push(base.clone());
    }
    RawPanel {
        tickers: vec![
            "HOT".into(),
            "CALM1".into(),
            "CALM2".into(),
            "CALM3".into(),
            "CALM4".into(),
        ],
        first_week: epoch(),
        prices,
        volumes,
    }
}

/// One provider-style batch: integer volumes with batch maximum 100.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBatch {
    pub tickers: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Ground-truth volumes (reference first) and the batches a provider would
/// return for them: the reference plus up to four other terms per batch, each
/// batch rescaled so its maximum is 100 and rounded to integers.
pub fn ground_truth_batches(
    seed: u64,
    n_others: usize,
    n_weeks: usize,
) -> (Vec<String>, Vec<Vec<f64>>, Vec<RawBatch>) {
    let mut rng = rng(seed);
    let mut names = vec!["REF".to_string()];
    names.extend((0..n_others).map(|i| format!("T{i:02}")));
    let truth: Vec<Vec<f64>> = names
        .iter()
        .map(|_| {
            let level = rng.gen_range(0.6..1.0) * 1000.0;
            (0..n_weeks)
                .map(|_| level * rng.gen_range(0.5..1.0))
                .collect()
        })
        .collect();

    let mut batches = Vec::new();
    for chunk in (1..names.len()).collect::<Vec<_>>().chunks(4) {
        let members: Vec<usize> = std::iter::once(0).chain(chunk.iter().copied()).collect();
        let max = members
            .iter()
            .flat_map(|&i| truth[i].iter().copied())
            .fold(0.0, f64::max);
        batches.push(RawBatch {
            tickers: members.iter().map(|&i| names[i].clone()).collect(),
            values: members
                .iter()
                .map(|&i| truth[i].iter().map(|v| (v * 100.0 / max).round()).collect())
                .collect(),
        });
    }
    (names, truth, batches)
}

/// `date,ticker,close` rows: a Monday quote and the Friday close for each week.
pub fn prices_csv(panel: &RawPanel) -> String {
    let mut out = String::from("date,ticker,close\n");
    for t in 0..panel.n_weeks() {
        let sunday = panel.week_start(t);
        for (i, ticker) in panel.tickers.iter().enumerate() {
            let close = panel.prices[i][t];
            let monday = sunday + Days::new(1);
            let friday = sunday + Days::new(5);
            writeln!(out, "{monday},{ticker},{}", close * 0.99).unwrap();
            writeln!(out, "{friday},{ticker},{close}").unwrap();
        }
    }
    out
}

/// `week_start,ticker,volume` rows.
pub fn volumes_csv(panel: &RawPanel) -> String {
    let mut out = String::from("week_start,ticker,volume\n");
    for t in 0..panel.n_weeks() {
        for (i, ticker) in panel.tickers.iter().enumerate() {
            writeln!(
                out,
                "{},{ticker},{}",
                panel.week_start(t),
                panel.volumes[i][t]
            )
            .unwrap();
        }
    }
    out
}

/// Single-series price file for the benchmark index, Friday closes only.
pub fn benchmark_csv(ticker: &str, first_week: NaiveDate, levels: &[f64]) -> String {
    let mut out = String::from("date,ticker,close\n");
    for (t, level) in levels.iter().enumerate() {
        let friday = first_week + Days::new(7 * t as u64 + 5);
        writeln!(out, "{friday},{ticker},{level}").unwrap();
    }
    out
}

/// `week_start,<ticker>...` wide batch export.
pub fn batch_csv(batch: &RawBatch, first_week: NaiveDate) -> String {
    let mut out = format!("week_start,{}\n", batch.tickers.join(","));
    for t in 0..batch.values[0].len() {
        let row: Vec<String> = batch.values.iter().map(|s| format!("{}", s[t])).collect();
        writeln!(
            out,
            "{},{}",
            first_week + Days::new(7 * t as u64),
            row.join(",")
        )
        .unwrap();
    }
    out
}
