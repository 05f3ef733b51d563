//! Weekly-rebalanced backtests of the power-law portfolio and the passive
//! benchmark.
//!
//! Both timing modes evaluate the same return weeks (every price week after
//! the first). They differ in which volume week drives the weights:
//!
//! * in-sample: volumes of week `t` weight the returns of week `t`, so the
//!   weights see the same week they are scored on;
//! * out-of-sample: volumes of week `t` weight the returns of week `t + 1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::normalize::{resolve_zero_volumes, ZeroPolicy};
use crate::scalar::Scalar;
use crate::timeseries::{compute_returns, validate_panel, AlignedPanel, PricePanel, WeekId};
use crate::weighting::{compute_weights, DiscriminationParam, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimingMode {
    InSample,
    OutOfSample,
}

impl TimingMode {
    pub const ALL: [TimingMode; 2] = [TimingMode::InSample, TimingMode::OutOfSample];

    pub fn label(self) -> &'static str {
        match self {
            TimingMode::InSample => "in_sample",
            TimingMode::OutOfSample => "out_of_sample",
        }
    }

    /// Volume week position feeding the weights for return week position `k`
    /// (return week `k` ends at price week `k + 1`).
    fn signal_week(self, k: usize) -> usize {
        match self {
            TimingMode::InSample => k + 1,
            TimingMode::OutOfSample => k,
        }
    }
}

impl fmt::Display for TimingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestResult<T> {
    /// `None` for the buy-and-hold benchmark.
    pub mode: Option<TimingMode>,
    pub alpha: DiscriminationParam<T>,
    pub cost_rate: T,
    /// Return weeks that were evaluated, aligned with `portfolio_returns`.
    pub weeks: Vec<WeekId>,
    pub portfolio_returns: Vec<T>,
    /// Half the L1 distance between new and drifted weights, per evaluated week.
    pub turnover: Vec<T>,
    /// One entry per evaluated week; `week()` is the volume week used.
    pub weights_history: Vec<WeightVector<T>>,
    /// Return weeks left out because every asset was excluded.
    pub skipped: Vec<(WeekId, String)>,
}

impl<T> BacktestResult<T> {
    pub fn n_weeks(&self) -> usize {
        self.portfolio_returns.len()
    }
}

/// Weighted sum of `returns` over the included assets of `weights`.
///
/// `returns` is aligned with `weights.assets()`; a non-finite entry counts as
/// missing and is an error when that asset is included.
pub fn portfolio_return<T: Scalar>(weights: &WeightVector<T>, returns: &[T]) -> Result<T> {
    if returns.len() != weights.assets().len() {
        return Err(Error::InvalidParameter(format!(
            "{} returns for {} assets",
            returns.len(),
            weights.assets().len()
        )));
    }
    let mut total = T::zero();
    for (i, (&w, &r)) in weights.weights().iter().zip(returns).enumerate() {
        if weights.excluded()[i] {
            continue;
        }
        if !r.is_finite() {
            return Err(Error::DataGap {
                asset: weights.assets()[i].clone(),
            });
        }
        total = total + w * r;
    }
    Ok(total)
}

/// Rebalances every week to power-law weights and records the outcome.
///
/// A weekly return is `sum(w * r) - cost_rate * turnover`, where turnover
/// compares the new weights with last week's weights after they drifted with
/// realized returns. The first rebalance, and the first after a skipped week,
/// is charged nothing.
pub fn run_backtest<T: Scalar>(
    panel: &AlignedPanel<T>,
    alpha: DiscriminationParam<T>,
    mode: TimingMode,
    zero_policy: ZeroPolicy<T>,
    cost_rate: T,
) -> Result<BacktestResult<T>> {
    if !(cost_rate.is_finite() && cost_rate >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "cost rate must be finite and nonnegative, got {cost_rate}"
        )));
    }
    let diags = validate_panel(panel);
    if !diags.is_empty() {
        return Err(Error::InvalidPanel(diags));
    }

    let assets = panel.assets();
    let n_ret = panel.returns.n_weeks();
    let (volumes, mask) = resolve_zero_volumes(&panel.volumes, zero_policy);

    let mut result = BacktestResult {
        mode: Some(mode),
        alpha,
        cost_rate,
        weeks: Vec::with_capacity(n_ret),
        portfolio_returns: Vec::with_capacity(n_ret),
        turnover: Vec::with_capacity(n_ret),
        weights_history: Vec::with_capacity(n_ret),
        skipped: Vec::new(),
    };
    let mut drifted: Option<Vec<T>> = None;
    let mut returns = vec![T::zero(); assets.len()];

    for k in 0..n_ret {
        let return_week = panel.returns.weeks[k];
        let s = mode.signal_week(k);
        let signal_week = volumes.weeks[s];
        let excluded = mask.column(s);
        if excluded.iter().all(|x| *x) {
            result.skipped.push((
                return_week,
                format!("every asset has zero volume in {signal_week}"),
            ));
            drifted = None;
            continue;
        }

        let weights = compute_weights(
            signal_week,
            assets,
            &volumes.cross_section(s),
            alpha,
            &excluded,
        )
        .map_err(|e| e.at_week(signal_week))?;
        for (i, r) in returns.iter_mut().enumerate() {
            *r = panel.returns.returns[i][k];
        }
        let gross = portfolio_return(&weights, &returns).map_err(|e| e.at_week(return_week))?;

        let turnover = match &drifted {
            Some(prev) => {
                let half = T::of(0.5);
                half * weights
                    .weights()
                    .iter()
                    .zip(prev)
                    .map(|(&w, &d)| (w - d).abs())
                    .sum::<T>()
            }
            None => T::zero(),
        };
        let growth = T::one() + gross;
        drifted = Some(
            weights
                .weights()
                .iter()
                .zip(&returns)
                .map(|(&w, &r)| {
                    if w == T::zero() {
                        T::zero()
                    } else {
                        w * (T::one() + r) / growth
                    }
                })
                .collect(),
        );

        result.weeks.push(return_week);
        result.portfolio_returns.push(gross - cost_rate * turnover);
        result.turnover.push(turnover);
        result.weights_history.push(weights);
    }
    Ok(result)
}

/// Holds a single index over the whole panel.
pub fn buy_and_hold<T: Scalar>(index_prices: &PricePanel<T>) -> Result<BacktestResult<T>> {
    if index_prices.n_assets() != 1 {
        return Err(Error::InvalidParameter(format!(
            "benchmark must hold exactly one series, got {}",
            index_prices.n_assets()
        )));
    }
    let returns = compute_returns(index_prices)?;
    let weights_history = index_prices.weeks[..returns.n_weeks()]
        .iter()
        .map(|w| WeightVector::single(*w, index_prices.assets.clone()))
        .collect::<Result<Vec<_>>>()?;
    let n = returns.n_weeks();
    Ok(BacktestResult {
        mode: None,
        alpha: DiscriminationParam::uniform(),
        cost_rate: T::zero(),
        weeks: returns.weeks,
        portfolio_returns: returns.returns.into_iter().next().unwrap_or_default(),
        turnover: vec![T::zero(); n],
        weights_history,
        skipped: Vec::new(),
    })
}
