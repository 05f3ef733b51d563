#![allow(dead_code)]

use trendfolio_core::{contiguous_calendar, AlignedPanel64, AssetId, PricePanel, VolumePanel};
use trendfolio_testkit::fixtures::RawPanel;

pub fn ids(tickers: &[String]) -> Vec<AssetId> {
    tickers.iter().map(|t| AssetId::new(t).unwrap()).collect()
}

pub fn aligned(raw: &RawPanel) -> AlignedPanel64 {
    let weeks = contiguous_calendar(raw.first_week, raw.n_weeks());
    let prices = PricePanel::new(ids(&raw.tickers), weeks.clone(), raw.prices.clone()).unwrap();
    let volumes = VolumePanel::new(ids(&raw.tickers), weeks, raw.volumes.clone()).unwrap();
    AlignedPanel64::new(prices, volumes).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
