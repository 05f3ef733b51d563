//! Week calendar, price/return/volume panels and the weekly alignment of raw
//! observations.
//!
//! Weeks run Sunday through Saturday. A date belongs to the week whose start
//! is the most recent Sunday on or before it; no timezone logic is involved.
//! Panels are stored asset-major: `matrix[asset][week]`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use chrono::{Datelike, Days, NaiveDate, Weekday};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Shared, ordered list of assets. Panels and weight vectors index into it.
pub type Universe = Arc<[AssetId]>;

/// Sunday on or before `date`.
pub fn week_start(date: NaiveDate) -> NaiveDate {
    let back = date.weekday().num_days_from_sunday();
    date - Days::new(u64::from(back))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeekId {
    start_date: NaiveDate,
    index: usize,
}

impl WeekId {
    pub fn new(start_date: NaiveDate, index: usize) -> Result<Self> {
        if start_date.weekday() != Weekday::Sun {
            return Err(Error::InvalidCalendar(format!(
                "week start {start_date} is a {:?}, not a Sunday",
                start_date.weekday()
            )));
        }
        Ok(Self { start_date, index })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    /// Saturday closing the week.
    pub fn end_date(&self) -> NaiveDate {
        self.start_date + Days::new(6)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        week_start(date) == self.start_date
    }
}

impl fmt::Display for WeekId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "week {} ({})", self.index, self.start_date)
    }
}

/// `count` consecutive weeks starting with the week containing `first`.
pub fn contiguous_calendar(first: NaiveDate, count: usize) -> Vec<WeekId> {
    let start = week_start(first);
    (0..count)
        .map(|k| WeekId {
            start_date: start + Days::new(7 * k as u64),
            index: k,
        })
        .collect()
}

/// Contiguous calendar covering every week from `first` to `last` inclusive.
pub fn calendar_spanning(first: NaiveDate, last: NaiveDate) -> Vec<WeekId> {
    let (a, b) = (week_start(first.min(last)), week_start(first.max(last)));
    let count = ((b - a).num_days() / 7) as usize + 1;
    contiguous_calendar(a, count)
}

/// Ticker symbol identifying one asset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssetId(String);

impl AssetId {
    pub fn new(ticker: &str) -> Result<Self> {
        let ok = (1..=6).contains(&ticker.len())
            && ticker
                .bytes()
                .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit() || b == b'.' || b == b'-')
            && ticker.as_bytes()[0].is_ascii_alphanumeric();
        if ok {
            Ok(Self(ticker.to_owned()))
        } else {
            Err(Error::InvalidAsset(ticker.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for AssetId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Builds a universe, rejecting duplicates.
pub fn universe(assets: Vec<AssetId>) -> Result<Universe> {
    let mut seen = HashSet::new();
    for a in &assets {
        if !seen.insert(a) {
            return Err(Error::DuplicateAsset(a.clone()));
        }
    }
    Ok(assets.into())
}

fn check_shape<T>(
    what: &str,
    assets: &[AssetId],
    weeks: &[WeekId],
    matrix: &[Vec<T>],
) -> Result<()> {
    if matrix.len() != assets.len() || matrix.iter().any(|row| row.len() != weeks.len()) {
        return Err(Error::InvalidParameter(format!(
            "{what} matrix is not {} assets x {} weeks",
            assets.len(),
            weeks.len()
        )));
    }
    Ok(())
}

/// Weekly closing prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel<T> {
    pub assets: Universe,
    pub weeks: Vec<WeekId>,
    pub close: Vec<Vec<T>>,
}

impl<T: Scalar> PricePanel<T> {
    pub fn new(assets: Vec<AssetId>, weeks: Vec<WeekId>, close: Vec<Vec<T>>) -> Result<Self> {
        let assets = universe(assets)?;
        check_shape("price", &assets, &weeks, &close)?;
        for (i, row) in close.iter().enumerate() {
            for (t, &p) in row.iter().enumerate() {
                if !(p.is_finite() && p > T::zero()) {
                    return Err(Error::InvalidPrice {
                        asset: assets[i].clone(),
                        date: weeks[t].start_date,
                        value: p.as_f64(),
                    });
                }
            }
        }
        Ok(Self {
            assets,
            weeks,
            close,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn n_weeks(&self) -> usize {
        self.weeks.len()
    }

    pub fn asset_index(&self, asset: &AssetId) -> Option<usize> {
        self.assets.iter().position(|a| a == asset)
    }

    /// One `(week start, asset, close)` record per entry, week-major.
    pub fn to_records(&self) -> Vec<(NaiveDate, AssetId, T)> {
        let mut out = Vec::with_capacity(self.n_assets() * self.n_weeks());
        for (t, w) in self.weeks.iter().enumerate() {
            for (i, a) in self.assets.iter().enumerate() {
                out.push((w.start_date, a.clone(), self.close[i][t]));
            }
        }
        out
    }
}

/// Simple weekly returns. `weeks` starts at the price panel's second week.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel<T> {
    pub assets: Universe,
    pub weeks: Vec<WeekId>,
    pub returns: Vec<Vec<T>>,
}

impl<T> ReturnPanel<T> {
    pub fn n_weeks(&self) -> usize {
        self.weeks.len()
    }
}

/// Search-volume scores, one row per asset.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumePanel<T> {
    pub assets: Universe,
    pub weeks: Vec<WeekId>,
    pub volume: Vec<Vec<T>>,
}

impl<T: Scalar> VolumePanel<T> {
    pub fn new(assets: Vec<AssetId>, weeks: Vec<WeekId>, volume: Vec<Vec<T>>) -> Result<Self> {
        let assets = universe(assets)?;
        check_shape("volume", &assets, &weeks, &volume)?;
        for (i, row) in volume.iter().enumerate() {
            if let Some(t) = row.iter().position(|v| !(v.is_finite() && *v >= T::zero())) {
                return Err(Error::InvalidParameter(format!(
                    "volume {} for {} at {} is not a finite nonnegative number",
                    row[t], assets[i], weeks[t]
                )));
            }
        }
        Ok(Self {
            assets,
            weeks,
            volume,
        })
    }

    pub fn n_weeks(&self) -> usize {
        self.weeks.len()
    }

    pub fn asset_index(&self, asset: &AssetId) -> Option<usize> {
        self.assets.iter().position(|a| a == asset)
    }

    /// Volumes of every asset in week position `t`.
    pub fn cross_section(&self, t: usize) -> Vec<T> {
        self.volume.iter().map(|row| row[t]).collect()
    }
}

/// Prices, returns and volumes over one asset list and week calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel<T> {
    pub prices: PricePanel<T>,
    pub returns: ReturnPanel<T>,
    pub volumes: VolumePanel<T>,
}

impl<T: Scalar> AlignedPanel<T> {
    /// Computes returns from `prices` and checks every panel invariant.
    pub fn new(prices: PricePanel<T>, volumes: VolumePanel<T>) -> Result<Self> {
        let returns = compute_returns(&prices)?;
        let panel = Self {
            prices,
            returns,
            volumes,
        };
        let diags = validate_panel(&panel);
        if diags.is_empty() {
            Ok(panel)
        } else {
            Err(Error::InvalidPanel(diags))
        }
    }

    pub fn assets(&self) -> &Universe {
        &self.prices.assets
    }

    pub fn n_assets(&self) -> usize {
        self.prices.n_assets()
    }

    pub fn n_weeks(&self) -> usize {
        self.prices.n_weeks()
    }
}

/// Collapses dated closes into one close per asset and week.
///
/// The weekly close is the last observation inside the Sunday-Saturday
/// window. Weeks in which no asset traded are dropped and the surviving weeks
/// are re-indexed from 0. Observations outside the calendar are ignored.
/// Assets are ordered by first appearance in `daily`.
pub fn align_to_weeks<T: Scalar>(
    daily: &[(NaiveDate, AssetId, T)],
    calendar: &[WeekId],
) -> Result<PricePanel<T>> {
    let first = calendar
        .first()
        .ok_or_else(|| Error::InvalidCalendar("calendar is empty".into()))?;
    for pair in calendar.windows(2) {
        if (pair[1].start_date - pair[0].start_date).num_days() != 7
            || pair[1].index <= pair[0].index
        {
            return Err(Error::InvalidCalendar(format!(
                "{} does not follow {} by one week",
                pair[1], pair[0]
            )));
        }
    }

    let mut assets: Vec<AssetId> = Vec::new();
    let mut slot: HashMap<&AssetId, usize> = HashMap::new();
    let mut seen: HashSet<(NaiveDate, &AssetId)> = HashSet::new();
    // last[asset][week] = (date, close) of the latest observation so far
    let mut last: Vec<Vec<Option<(NaiveDate, T)>>> = Vec::new();

    for (date, asset, close) in daily {
        if !seen.insert((*date, asset)) {
            return Err(Error::DuplicateObservation {
                asset: asset.clone(),
                date: *date,
            });
        }
        if !(close.is_finite() && *close > T::zero()) {
            return Err(Error::InvalidPrice {
                asset: asset.clone(),
                date: *date,
                value: close.as_f64(),
            });
        }
        let i = *slot.entry(asset).or_insert_with(|| {
            assets.push(asset.clone());
            last.push(vec![None; calendar.len()]);
            assets.len() - 1
        });
        let offset = (week_start(*date) - first.start_date).num_days();
        if offset < 0 || offset / 7 >= calendar.len() as i64 {
            continue;
        }
        let cell = &mut last[i][(offset / 7) as usize];
        if cell.is_none_or(|(d, _)| d < *date) {
            *cell = Some((*date, *close));
        }
    }

    let retained: Vec<usize> = (0..calendar.len())
        .filter(|&t| last.iter().any(|row| row[t].is_some()))
        .collect();
    if retained.is_empty() {
        return Err(Error::InsufficientData {
            what: "week with observations",
            needed: 1,
            got: 0,
        });
    }

    let mut gaps = Vec::new();
    for &t in &retained {
        for (i, row) in last.iter().enumerate() {
            if row[t].is_none() {
                gaps.push((assets[i].clone(), calendar[t]));
            }
        }
    }
    if !gaps.is_empty() {
        gaps.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        return Err(Error::PriceGaps(gaps));
    }

    let weeks = retained
        .iter()
        .enumerate()
        .map(|(k, &t)| WeekId {
            start_date: calendar[t].start_date,
            index: k,
        })
        .collect();
    let close = last
        .iter()
        .map(|row| {
            retained
                .iter()
                .map(|&t| row[t].expect("gap checked").1)
                .collect()
        })
        .collect();
    PricePanel::new(assets, weeks, close)
}

/// Simple returns `(p[t] - p[t-1]) / p[t-1]` for every asset.
pub fn compute_returns<T: Scalar>(prices: &PricePanel<T>) -> Result<ReturnPanel<T>> {
    if prices.n_weeks() < 2 {
        return Err(Error::InsufficientData {
            what: "weeks of prices",
            needed: 2,
            got: prices.n_weeks(),
        });
    }
    let mut returns = Vec::with_capacity(prices.n_assets());
    for (i, row) in prices.close.iter().enumerate() {
        if let Some(t) = row.iter().position(|p| !(p.is_finite() && *p > T::zero())) {
            return Err(Error::InvalidPrice {
                asset: prices.assets[i].clone(),
                date: prices.weeks[t].start_date,
                value: row[t].as_f64(),
            });
        }
        returns.push(row.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect());
    }
    Ok(ReturnPanel {
        assets: prices.assets.clone(),
        weeks: prices.weeks[1..].to_vec(),
        returns,
    })
}

/// Re-expresses `volumes` on the asset order and week calendar of `prices`.
///
/// Volume weeks outside the price calendar are dropped. Every price week must
/// be present for every asset, and both panels must list the same assets.
pub fn align_volumes<T: Scalar>(
    volumes: &VolumePanel<T>,
    prices: &PricePanel<T>,
) -> Result<VolumePanel<T>> {
    let missing: Vec<String> = prices
        .assets
        .iter()
        .filter(|a| volumes.asset_index(a).is_none())
        .map(|a| a.to_string())
        .collect();
    let extra: Vec<String> = volumes
        .assets
        .iter()
        .filter(|a| prices.asset_index(a).is_none())
        .map(|a| a.to_string())
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::UniverseMismatch(format!(
            "no volumes for [{}]; no prices for [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }

    let by_date: HashMap<NaiveDate, usize> = volumes
        .weeks
        .iter()
        .enumerate()
        .map(|(k, w)| (w.start_date, k))
        .collect();
    let mut gaps = Vec::new();
    let cols: Vec<Option<usize>> = prices
        .weeks
        .iter()
        .map(|w| {
            let col = by_date.get(&w.start_date).copied();
            if col.is_none() {
                gaps.extend(prices.assets.iter().map(|a| (a.clone(), *w)));
            }
            col
        })
        .collect();
    if !gaps.is_empty() {
        return Err(Error::VolumeGaps(gaps));
    }

    let volume = prices
        .assets
        .iter()
        .map(|a| {
            let row = &volumes.volume[volumes.asset_index(a).expect("checked above")];
            cols.iter()
                .map(|c| row[c.expect("checked above")])
                .collect()
        })
        .collect();
    Ok(VolumePanel {
        assets: prices.assets.clone(),
        weeks: prices.weeks.clone(),
        volume,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reason {
    EmptyUniverse,
    DuplicateAsset,
    Shape(String),
    AssetMismatch(&'static str),
    CalendarMismatch(&'static str),
    NotSunday,
    UnorderedWeek,
    NonFinite(&'static str),
    NonPositivePrice(f64),
    NegativeVolume(f64),
    ReturnOutOfRange(f64),
    ReturnInconsistent { stored: f64, implied: f64 },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::EmptyUniverse => write!(f, "panel has no assets"),
            Reason::DuplicateAsset => write!(f, "asset listed twice"),
            Reason::Shape(s) => write!(f, "bad dimensions: {s}"),
            Reason::AssetMismatch(p) => write!(f, "{p} asset list differs from prices"),
            Reason::CalendarMismatch(p) => write!(f, "{p} week calendar differs from prices"),
            Reason::NotSunday => write!(f, "week does not start on a Sunday"),
            Reason::UnorderedWeek => write!(f, "week out of order"),
            Reason::NonFinite(p) => write!(f, "non-finite {p} entry"),
            Reason::NonPositivePrice(v) => write!(f, "non-positive price {v}"),
            Reason::NegativeVolume(v) => write!(f, "negative volume {v}"),
            Reason::ReturnOutOfRange(v) => write!(f, "return {v} not above -1"),
            Reason::ReturnInconsistent { stored, implied } => {
                write!(f, "stored return {stored} but prices imply {implied}")
            }
        }
    }
}

/// One violated panel invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub asset: Option<AssetId>,
    pub week: Option<WeekId>,
    pub reason: Reason,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.asset, &self.week) {
            (Some(a), Some(w)) => write!(f, "{a} at {w}: {}", self.reason),
            (Some(a), None) => write!(f, "{a}: {}", self.reason),
            (None, Some(w)) => write!(f, "{w}: {}", self.reason),
            (None, None) => write!(f, "{}", self.reason),
        }
    }
}

fn diag(asset: Option<&AssetId>, week: Option<WeekId>, reason: Reason) -> Diagnostic {
    Diagnostic {
        asset: asset.cloned(),
        week,
        reason,
    }
}

fn shape_ok<T>(
    out: &mut Vec<Diagnostic>,
    name: &'static str,
    n_assets: usize,
    n_weeks: usize,
    matrix: &[Vec<T>],
) -> bool {
    if matrix.len() != n_assets {
        out.push(diag(
            None,
            None,
            Reason::Shape(format!(
                "{name} has {} rows for {n_assets} assets",
                matrix.len()
            )),
        ));
        return false;
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != n_weeks) {
        out.push(diag(
            None,
            None,
            Reason::Shape(format!(
                "{name} row has {} columns for {n_weeks} weeks",
                row.len()
            )),
        ));
        return false;
    }
    true
}

/// Lists every violated invariant of `panel`; empty when the panel is sound.
pub fn validate_panel<T: Scalar>(panel: &AlignedPanel<T>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let prices = &panel.prices;
    let assets = &prices.assets;

    if assets.is_empty() {
        out.push(diag(None, None, Reason::EmptyUniverse));
    }
    let mut seen = HashSet::new();
    for a in assets.iter() {
        if !seen.insert(a) {
            out.push(diag(Some(a), None, Reason::DuplicateAsset));
        }
    }
    for (k, w) in prices.weeks.iter().enumerate() {
        if w.start_date.weekday() != Weekday::Sun {
            out.push(diag(None, Some(*w), Reason::NotSunday));
        }
        if k > 0 {
            let prev = prices.weeks[k - 1];
            if w.start_date <= prev.start_date || w.index <= prev.index {
                out.push(diag(None, Some(*w), Reason::UnorderedWeek));
            }
        }
    }

    let n = assets.len();
    let t_len = prices.weeks.len();
    let prices_ok = shape_ok(&mut out, "prices", n, t_len, &prices.close);
    if prices_ok {
        for (i, row) in prices.close.iter().enumerate() {
            for (t, &p) in row.iter().enumerate() {
                if !p.is_finite() {
                    out.push(diag(
                        Some(&assets[i]),
                        Some(prices.weeks[t]),
                        Reason::NonFinite("price"),
                    ));
                } else if p <= T::zero() {
                    out.push(diag(
                        Some(&assets[i]),
                        Some(prices.weeks[t]),
                        Reason::NonPositivePrice(p.as_f64()),
                    ));
                }
            }
        }
    }

    let returns = &panel.returns;
    if returns.assets[..] != assets[..] {
        out.push(diag(None, None, Reason::AssetMismatch("returns")));
    } else if t_len == 0 || returns.weeks[..] != prices.weeks[1..] {
        out.push(diag(None, None, Reason::CalendarMismatch("returns")));
    } else if shape_ok(&mut out, "returns", n, t_len - 1, &returns.returns) {
        let tol = T::epsilon() * T::of(64.0);
        for (i, row) in returns.returns.iter().enumerate() {
            for (t, &r) in row.iter().enumerate() {
                let week = Some(returns.weeks[t]);
                if !r.is_finite() {
                    out.push(diag(Some(&assets[i]), week, Reason::NonFinite("return")));
                } else if r <= -T::one() {
                    out.push(diag(
                        Some(&assets[i]),
                        week,
                        Reason::ReturnOutOfRange(r.as_f64()),
                    ));
                } else if prices_ok {
                    let (p0, p1) = (prices.close[i][t], prices.close[i][t + 1]);
                    let implied = (p1 - p0) / p0;
                    if (implied - r).abs() > tol * (T::one() + implied.abs()) {
                        out.push(diag(
                            Some(&assets[i]),
                            week,
                            Reason::ReturnInconsistent {
                                stored: r.as_f64(),
                                implied: implied.as_f64(),
                            },
                        ));
                    }
                }
            }
        }
    }

    let volumes = &panel.volumes;
    if volumes.assets[..] != assets[..] {
        out.push(diag(None, None, Reason::AssetMismatch("volumes")));
    } else if volumes.weeks != prices.weeks {
        out.push(diag(None, None, Reason::CalendarMismatch("volumes")));
    } else if shape_ok(&mut out, "volumes", n, t_len, &volumes.volume) {
        for (i, row) in volumes.volume.iter().enumerate() {
            for (t, &v) in row.iter().enumerate() {
                let week = Some(volumes.weeks[t]);
                if !v.is_finite() {
                    out.push(diag(Some(&assets[i]), week, Reason::NonFinite("volume")));
                } else if v < T::zero() {
                    out.push(diag(
                        Some(&assets[i]),
                        week,
                        Reason::NegativeVolume(v.as_f64()),
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn a(t: &str) -> AssetId {
        AssetId::new(t).unwrap()
    }

    // 2024-01-07 is a Sunday.
    fn cal(n: usize) -> Vec<WeekId> {
        contiguous_calendar(d(2024, 1, 7), n)
    }

    fn panel(prices: Vec<Vec<f64>>, volumes: Vec<Vec<f64>>) -> AlignedPanel<f64> {
        let n = prices.len();
        let assets: Vec<_> = (0..n).map(|i| a(&format!("S{i}"))).collect();
        let weeks = cal(prices[0].len());
        let p = PricePanel::new(assets.clone(), weeks.clone(), prices).unwrap();
        let v = VolumePanel::new(assets, weeks, volumes).unwrap();
        AlignedPanel::new(p, v).unwrap()
    }

    #[test]
    fn week_start_is_previous_sunday() {
        assert_eq!(week_start(d(2024, 1, 7)), d(2024, 1, 7));
        assert_eq!(week_start(d(2024, 1, 13)), d(2024, 1, 7));
        assert_eq!(week_start(d(2024, 1, 14)), d(2024, 1, 14));
        assert!(WeekId::new(d(2024, 1, 8), 0).is_err());
        let w = WeekId::new(d(2024, 1, 7), 0).unwrap();
        assert_eq!(w.end_date(), d(2024, 1, 13));
        assert!(w.contains(d(2024, 1, 10)));
        assert!(!w.contains(d(2024, 1, 14)));
    }

    #[test]
    fn calendar_is_contiguous() {
        let c = calendar_spanning(d(2024, 1, 10), d(2024, 2, 1));
        assert_eq!(c.len(), 4);
        assert_eq!(c[0].start_date(), d(2024, 1, 7));
        assert_eq!(c[3].start_date(), d(2024, 1, 28));
        assert_eq!(c[3].index(), 3);
    }

    #[test]
    fn asset_ids() {
        assert!(AssetId::new("XOM").is_ok());
        assert!(AssetId::new("BRK.B").is_ok());
        assert!(AssetId::new("").is_err());
        assert!(AssetId::new("toolong").is_err());
        assert!(AssetId::new("ge").is_err());
        assert!(AssetId::new("A B").is_err());
    }

    #[test]
    fn last_close_of_week_wins() {
        let recs = vec![
            (d(2024, 1, 8), a("X"), 100.0),
            (d(2024, 1, 12), a("X"), 104.0),
        ];
        let p = align_to_weeks(&recs, &cal(1)).unwrap();
        assert_eq!(p.close, vec![vec![104.0]]);

        // order of input rows must not matter
        let rev: Vec<_> = recs.into_iter().rev().collect();
        assert_eq!(
            align_to_weeks(&rev, &cal(1)).unwrap().close,
            vec![vec![104.0]]
        );
    }

    #[test]
    fn single_observation_week() {
        let recs = vec![(d(2024, 1, 10), a("X"), 50.0)];
        let p = align_to_weeks(&recs, &cal(1)).unwrap();
        assert_eq!(p.close, vec![vec![50.0]]);
    }

    #[test]
    fn gap_names_asset_and_week() {
        let c = cal(5);
        let mut recs = Vec::new();
        for (t, w) in c.iter().enumerate() {
            let day = w.start_date() + Days::new(5);
            recs.push((day, a("X"), 10.0 + t as f64));
            if t != 3 {
                recs.push((day, a("Y"), 20.0));
            }
        }
        match align_to_weeks(&recs, &c) {
            Err(Error::PriceGaps(g)) => assert_eq!(g, vec![(a("Y"), c[3])]),
            other => panic!("expected gap error, got {other:?}"),
        }
    }

    #[test]
    fn empty_weeks_are_dropped_and_reindexed() {
        let c = cal(4);
        let recs = vec![(d(2024, 1, 8), a("X"), 1.0), (d(2024, 1, 29), a("X"), 2.0)];
        let p = align_to_weeks(&recs, &c).unwrap();
        assert_eq!(p.weeks.len(), 2);
        assert_eq!(p.weeks[1].start_date(), d(2024, 1, 28));
        assert_eq!(p.weeks[1].index(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        let dup = vec![(d(2024, 1, 8), a("X"), 1.0), (d(2024, 1, 8), a("X"), 2.0)];
        assert!(matches!(
            align_to_weeks(&dup, &cal(1)),
            Err(Error::DuplicateObservation { .. })
        ));
        let neg = vec![(d(2024, 1, 8), a("X"), -1.0)];
        assert!(matches!(
            align_to_weeks(&neg, &cal(1)),
            Err(Error::InvalidPrice { .. })
        ));
        assert!(matches!(
            align_to_weeks::<f64>(&[], &[]),
            Err(Error::InvalidCalendar(_))
        ));
        let mut gappy = cal(3);
        gappy.remove(1);
        assert!(matches!(
            align_to_weeks(&neg, &gappy),
            Err(Error::InvalidCalendar(_))
        ));
    }

    #[test]
    fn returns_examples() {
        let r = |p: Vec<f64>| {
            let n = p.len();
            let panel = PricePanel::new(vec![a("X")], cal(n), vec![p]).unwrap();
            compute_returns(&panel).unwrap()
        };
        assert_eq!(r(vec![100.0, 110.0]).returns[0].len(), 1);
        assert!((r(vec![100.0, 110.0]).returns[0][0] - 0.10).abs() < 1e-15);
        assert_eq!(r(vec![50.0, 50.0, 50.0]).returns[0], vec![0.0, 0.0]);
        let out = r(vec![100.0, 80.0, 100.0]);
        assert!((out.returns[0][0] + 0.20).abs() < 1e-15);
        assert!((out.returns[0][1] - 0.25).abs() < 1e-15);
        assert_eq!(out.weeks[0], cal(3)[1]);
    }

    #[test]
    fn returns_need_two_weeks() {
        let p = PricePanel::new(vec![a("X")], cal(1), vec![vec![1.0]]).unwrap();
        assert!(matches!(
            compute_returns(&p),
            Err(Error::InsufficientData {
                needed: 2,
                got: 1,
                ..
            })
        ));
    }

    #[test]
    fn consistent_panel_has_no_diagnostics() {
        let prices: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..10).map(|t| 10.0 + i as f64 + t as f64).collect())
            .collect();
        let vols = vec![vec![5.0; 10]; 3];
        assert!(validate_panel(&panel(prices, vols)).is_empty());
    }

    #[test]
    fn calendar_mismatch_is_reported() {
        let mut p = panel(vec![vec![1.0; 10]], vec![vec![1.0; 10]]);
        p.volumes.weeks.pop();
        for row in &mut p.volumes.volume {
            row.pop();
        }
        let diags = validate_panel(&p);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].reason, Reason::CalendarMismatch("volumes"));
    }

    #[test]
    fn nan_volume_is_located() {
        let mut p = panel(vec![vec![1.0; 4]; 2], vec![vec![1.0; 4]; 2]);
        p.volumes.volume[1][2] = f64::NAN;
        let diags = validate_panel(&p);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].asset, Some(a("S1")));
        assert_eq!(diags[0].week, Some(p.prices.weeks[2]));
        assert_eq!(diags[0].reason, Reason::NonFinite("volume"));
    }

    #[test]
    fn tampered_return_is_reported() {
        let mut p = panel(vec![vec![1.0, 2.0, 3.0]], vec![vec![1.0; 3]]);
        p.returns.returns[0][1] = 0.4;
        let diags = validate_panel(&p);
        assert!(matches!(diags[0].reason, Reason::ReturnInconsistent { .. }));
    }

    #[test]
    fn volumes_follow_price_calendar() {
        let prices = PricePanel::new(vec![a("X"), a("Y")], cal(3), vec![vec![1.0; 3]; 2]).unwrap();
        // volumes cover one extra leading week and list assets in another order
        let vweeks = contiguous_calendar(d(2023, 12, 31), 4);
        let vols = VolumePanel::new(
            vec![a("Y"), a("X")],
            vweeks,
            vec![vec![9.0, 1.0, 2.0, 3.0], vec![9.0, 4.0, 5.0, 6.0]],
        )
        .unwrap();
        let aligned = align_volumes(&vols, &prices).unwrap();
        assert_eq!(
            aligned.volume,
            vec![vec![4.0, 5.0, 6.0], vec![1.0, 2.0, 3.0]]
        );
        assert_eq!(aligned.weeks, prices.weeks);

        let short = VolumePanel::new(vec![a("X"), a("Y")], cal(2), vec![vec![1.0; 2]; 2]).unwrap();
        assert!(matches!(
            align_volumes(&short, &prices),
            Err(Error::VolumeGaps(_))
        ));
        let other = VolumePanel::new(vec![a("X")], cal(3), vec![vec![1.0; 3]]).unwrap();
        assert!(matches!(
            align_volumes(&other, &prices),
            Err(Error::UniverseMismatch(_))
        ));
    }
}
