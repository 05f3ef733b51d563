//! Weekly performance statistics: mean, sample standard deviation, Sharpe
//! ratio (mean over standard deviation, no risk-free rate, no annualization)
//! and the compounded value path.

use crate::backtest::BacktestResult;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::timeseries::WeekId;

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceSummary<T> {
    pub mean_return: T,
    /// Sample standard deviation (divisor `n - 1`).
    pub std_dev: T,
    /// `None` when the return series has zero variance.
    pub sharpe: Option<T>,
    pub n_weeks: usize,
    pub cumulative_profit: T,
    /// `value_path[k]` is the value after `k + 1` weeks, starting from 1.
    pub value_path: Vec<T>,
    pub first_week: WeekId,
    pub last_week: WeekId,
}

impl<T: Scalar> PerformanceSummary<T> {
    pub fn sharpe_ratio(&self) -> Result<T> {
        self.sharpe.ok_or(Error::SharpeUndefined)
    }
}

/// Compounded value after each week, starting from 1.
pub fn value_path<T: Scalar>(returns: &[T]) -> Vec<T> {
    returns
        .iter()
        .scan(T::one(), |v, &r| {
            *v = *v * (T::one() + r);
            Some(*v)
        })
        .collect()
}

/// Mean, sample standard deviation and Sharpe ratio of a return series.
pub fn moments<T: Scalar>(returns: &[T]) -> Result<(T, T, Option<T>)> {
    let n = returns.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "weekly returns",
            needed: 2,
            got: n,
        });
    }
    if returns.iter().all(|r| *r == returns[0]) {
        return Ok((returns[0], T::zero(), None));
    }
    let mean = returns.iter().copied().sum::<T>() / T::of(n as f64);
    let ss: T = returns.iter().map(|&r| (r - mean) * (r - mean)).sum();
    let std = (ss / T::of((n - 1) as f64)).sqrt();
    let sharpe = (std > T::zero()).then(|| mean / std);
    Ok((mean, std, sharpe))
}

pub fn summarize<T: Scalar>(result: &BacktestResult<T>) -> Result<PerformanceSummary<T>> {
    let returns = &result.portfolio_returns;
    let (mean_return, std_dev, sharpe) = moments(returns)?;
    let path = value_path(returns);
    if let Some(k) = path.iter().position(|v| v.is_nan() || *v <= T::zero()) {
        return Err(Error::Ruin {
            position: k,
            value: path[k].as_f64(),
        });
    }
    let last = *path.last().expect("at least two returns");
    Ok(PerformanceSummary {
        mean_return,
        std_dev,
        sharpe,
        n_weeks: returns.len(),
        cumulative_profit: last - T::one(),
        value_path: path,
        first_week: result.weeks[0],
        last_week: result.weeks[result.weeks.len() - 1],
    })
}

/// Strategy cumulative profit in excess of the benchmark's.
pub fn cumulative_profit_vs<T: Scalar>(
    benchmark: &PerformanceSummary<T>,
    strategy: &PerformanceSummary<T>,
) -> Result<T> {
    let span = |s: &PerformanceSummary<T>| {
        (
            s.first_week.start_date(),
            s.last_week.start_date(),
            s.n_weeks,
        )
    };
    if span(benchmark) != span(strategy) {
        return Err(Error::NotComparable(format!(
            "benchmark covers {} to {} ({} weeks), strategy {} to {} ({} weeks)",
            benchmark.first_week.start_date(),
            benchmark.last_week.start_date(),
            benchmark.n_weeks,
            strategy.first_week.start_date(),
            strategy.last_week.start_date(),
            strategy.n_weeks
        )));
    }
    Ok(strategy.cumulative_profit - benchmark.cumulative_profit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtest::TimingMode;
    use crate::timeseries::contiguous_calendar;
    use crate::weighting::DiscriminationParam;
    use chrono::NaiveDate;

    fn result(returns: Vec<f64>) -> BacktestResult<f64> {
        let n = returns.len();
        BacktestResult {
            mode: Some(TimingMode::InSample),
            alpha: DiscriminationParam::uniform(),
            cost_rate: 0.0,
            weeks: contiguous_calendar(NaiveDate::from_ymd_opt(2024, 1, 7).unwrap(), n),
            portfolio_returns: returns,
            turnover: vec![0.0; n],
            weights_history: Vec::new(),
            skipped: Vec::new(),
        }
    }

    #[test]
    fn symmetric_returns() {
        let s = summarize(&result(vec![0.10, -0.10])).unwrap();
        assert_eq!(s.mean_return, 0.0);
        assert_eq!(s.sharpe, Some(0.0));
        assert!((s.value_path[0] - 1.10).abs() < 1e-15);
        assert!((s.value_path[1] - 0.99).abs() < 1e-15);
        assert!((s.cumulative_profit + 0.01).abs() < 1e-15);
    }

    #[test]
    fn two_point_sample_std() {
        let s = summarize(&result(vec![0.01, 0.03])).unwrap();
        assert!((s.mean_return - 0.02).abs() < 1e-15);
        assert!((s.std_dev - 0.02f64.sqrt() / 10.0).abs() < 1e-15);
        assert!((s.sharpe.unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_has_no_sharpe() {
        let s = summarize(&result(vec![0.0; 5])).unwrap();
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.sharpe_ratio(), Err(Error::SharpeUndefined));

        let c = summarize(&result(vec![0.1; 3])).unwrap();
        assert_eq!(c.mean_return, 0.1);
        assert_eq!(c.sharpe, None);
    }

    #[test]
    fn needs_two_returns() {
        assert!(matches!(
            summarize(&result(vec![0.1])),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn ruin_is_an_error() {
        assert!(matches!(
            summarize(&result(vec![0.1, -1.5, 0.2])),
            Err(Error::Ruin { position: 1, .. })
        ));
    }

    #[test]
    fn excess_cumulative_profit() {
        let base = summarize(&result(vec![0.01, 0.02, 0.03])).unwrap();
        assert_eq!(cumulative_profit_vs(&base, &base).unwrap(), 0.0);

        let with = |cp: f64| PerformanceSummary {
            cumulative_profit: cp,
            ..base.clone()
        };
        let d = cumulative_profit_vs(&with(0.38), &with(1.63)).unwrap();
        assert!((d - 1.25).abs() < 1e-12);
        let d = cumulative_profit_vs(&with(0.62), &with(0.88)).unwrap();
        assert!((d - 0.26).abs() < 1e-12);

        let shorter = summarize(&result(vec![0.01, 0.02])).unwrap();
        assert!(matches!(
            cumulative_profit_vs(&shorter, &base),
            Err(Error::NotComparable(_))
        ));
    }
}
