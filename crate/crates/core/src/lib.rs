//! Backtesting engine for portfolios weighted by search volume.
//!
//! Each week the portfolio holds every asset with weight proportional to
//! `V^(-alpha)`, where `V` is the asset's search volume. The crate covers
//! weekly alignment of prices, merging of provider-normalized volume batches,
//! the weighting rule, in-sample and out-of-sample backtests, summary
//! statistics and a sweep over `alpha`.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`.

pub mod backtest;
pub mod error;
pub mod metrics;
pub mod normalize;
pub mod scalar;
pub mod sweep;
pub mod timeseries;
pub mod weighting;

pub use backtest::{buy_and_hold, portfolio_return, run_backtest, BacktestResult, TimingMode};
pub use error::{Error, Result};
pub use metrics::{cumulative_profit_vs, moments, summarize, value_path, PerformanceSummary};
pub use normalize::{
    merge_batches, resolve_zero_volumes, ExclusionMask, MergedVolumePanel, QueryBatch, ZeroPolicy,
};
pub use scalar::Scalar;
pub use sweep::{alpha_sweep, find_max_sharpe, find_min_variance, AlphaGrid, SweepRow, SweepTable};
pub use timeseries::{
    align_to_weeks, align_volumes, calendar_spanning, compute_returns, contiguous_calendar,
    universe, validate_panel, week_start, AlignedPanel, AssetId, Diagnostic, PricePanel, Reason,
    ReturnPanel, Universe, VolumePanel, WeekId,
};
pub use weighting::{compute_weights, DiscriminationParam, WeightVector};

pub type PricePanel64 = PricePanel<f64>;
pub type ReturnPanel64 = ReturnPanel<f64>;
pub type VolumePanel64 = VolumePanel<f64>;
pub type AlignedPanel64 = AlignedPanel<f64>;
pub type QueryBatch64 = QueryBatch<f64>;
pub type MergedVolumePanel64 = MergedVolumePanel<f64>;
pub type WeightVector64 = WeightVector<f64>;
pub type BacktestResult64 = BacktestResult<f64>;
pub type PerformanceSummary64 = PerformanceSummary<f64>;
pub type SweepTable64 = SweepTable<f64>;
pub type AlphaGrid64 = AlphaGrid<f64>;
pub type ZeroPolicy64 = ZeroPolicy<f64>;
pub type Alpha64 = DiscriminationParam<f64>;
