//! Grid sweep over the discrimination parameter and selection of the
//! minimum-variance and maximum-Sharpe points.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::backtest::{run_backtest, TimingMode};
use crate::error::{Error, Result};
use crate::metrics::{summarize, PerformanceSummary};
use crate::normalize::ZeroPolicy;
use crate::scalar::Scalar;
use crate::timeseries::{validate_panel, AlignedPanel};
use crate::weighting::DiscriminationParam;

const MAX_GRID_POINTS: usize = 1_000_000;

/// Evenly spaced alpha values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid<T> {
    min: T,
    max: T,
    step: T,
}

impl<T: Scalar> AlphaGrid<T> {
    pub fn new(min: T, max: T, step: T) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::InvalidParameter(
                "alpha grid bounds must be finite".into(),
            ));
        }
        if step <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "alpha step must be positive, got {step}"
            )));
        }
        if min > max {
            return Err(Error::InvalidParameter(format!(
                "alpha min {min} exceeds alpha max {max}"
            )));
        }
        let grid = Self { min, max, step };
        let count = grid.count_f64();
        if count > MAX_GRID_POINTS as f64 {
            return Err(Error::InvalidParameter(format!(
                "alpha grid would have {count} points"
            )));
        }
        Ok(grid)
    }

    pub fn min(&self) -> T {
        self.min
    }

    pub fn max(&self) -> T {
        self.max
    }

    pub fn step(&self) -> T {
        self.step
    }

    fn tolerance(&self) -> T {
        let scale = self.min.abs().max(self.max.abs()).max(T::one());
        T::of(1e-9).max(T::epsilon() * T::of(64.0) * scale)
    }

    fn count_f64(&self) -> f64 {
        (((self.max - self.min) + self.tolerance()) / self.step)
            .floor()
            .as_f64()
            + 1.0
    }

    /// Grid points `min + k * step`; the last point is snapped to `max` and a
    /// point within tolerance of zero is snapped to exactly zero.
    pub fn points(&self) -> Vec<T> {
        let n = self.count_f64() as usize;
        let tol = self.tolerance();
        (0..n)
            .map(|k| {
                let p = self.min + T::of(k as f64) * self.step;
                if (p - self.max).abs() <= tol {
                    self.max
                } else if p.abs() <= tol {
                    T::zero()
                } else {
                    p
                }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.count_f64() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl<T: Scalar> Default for AlphaGrid<T> {
    /// -2 to 2 in steps of 0.1: 41 points.
    fn default() -> Self {
        Self {
            min: T::of(-2.0),
            max: T::of(2.0),
            step: T::of(0.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub alpha: T,
    pub summary: PerformanceSummary<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<T> {
    pub mode: TimingMode,
    /// Successful grid points, ascending in alpha.
    pub rows: Vec<SweepRow<T>>,
    /// Grid points whose backtest failed, with the reason.
    pub skipped: Vec<(T, String)>,
}

impl<T: Scalar> SweepTable<T> {
    pub fn row(&self, alpha: T) -> Option<&SweepRow<T>> {
        self.rows.iter().find(|r| r.alpha == alpha)
    }
}

/// Backtests every grid point. Points run in parallel; the table is
/// assembled in grid order, so the output does not depend on scheduling.
pub fn alpha_sweep<T: Scalar>(
    panel: &AlignedPanel<T>,
    grid: &AlphaGrid<T>,
    mode: TimingMode,
    zero_policy: ZeroPolicy<T>,
    cost_rate: T,
) -> Result<SweepTable<T>> {
    // Whole-run problems surface as errors, not as a table of identical skips.
    let diags = validate_panel(panel);
    if !diags.is_empty() {
        return Err(Error::InvalidPanel(diags));
    }
    if !(cost_rate.is_finite() && cost_rate >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "cost rate must be finite and nonnegative, got {cost_rate}"
        )));
    }

    let outcomes: Vec<(T, Result<PerformanceSummary<T>>)> = grid
        .points()
        .into_par_iter()
        .map(|alpha| {
            let outcome = DiscriminationParam::new(alpha)
                .and_then(|a| run_backtest(panel, a, mode, zero_policy, cost_rate))
                .and_then(|r| summarize(&r));
            (alpha, outcome)
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (alpha, outcome) in outcomes {
        match outcome {
            Ok(summary) => rows.push(SweepRow { alpha, summary }),
            Err(e) => skipped.push((alpha, e.to_string())),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptySweep {
            skipped: skipped.len(),
            first_reason: skipped.first().map(|s| s.1.clone()).unwrap_or_default(),
        });
    }
    Ok(SweepTable {
        mode,
        rows,
        skipped,
    })
}

/// Ties go to the alpha closest to zero, then to the smaller alpha.
fn tie_break<T: Scalar>(a: T, b: T) -> Ordering {
    a.abs()
        .partial_cmp(&b.abs())
        .unwrap_or(Ordering::Equal)
        .then(a.partial_cmp(&b).unwrap_or(Ordering::Equal))
}

fn select_best<'a, T: Scalar>(
    rows: impl Iterator<Item = (&'a SweepRow<T>, T)>,
    prefer: Ordering,
) -> Option<&'a SweepRow<T>> {
    let mut best: Option<(&SweepRow<T>, T)> = None;
    for (row, score) in rows {
        let better = match best {
            None => true,
            Some((b, b_score)) => match score.partial_cmp(&b_score) {
                Some(o) if o == prefer => true,
                Some(Ordering::Equal) => tie_break(row.alpha, b.alpha) == Ordering::Less,
                _ => false,
            },
        };
        if better {
            best = Some((row, score));
        }
    }
    best.map(|(r, _)| r)
}

/// Row with the smallest standard deviation.
pub fn find_min_variance<T: Scalar>(table: &SweepTable<T>) -> Result<(T, &PerformanceSummary<T>)> {
    select_best(
        table.rows.iter().map(|r| (r, r.summary.std_dev)),
        Ordering::Less,
    )
    .map(|r| (r.alpha, &r.summary))
    .ok_or(Error::EmptyTable)
}

/// Row with the largest Sharpe ratio; rows without one are passed over.
pub fn find_max_sharpe<T: Scalar>(table: &SweepTable<T>) -> Result<(T, &PerformanceSummary<T>)> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    select_best(
        table
            .rows
            .iter()
            .filter_map(|r| r.summary.sharpe.map(|s| (r, s))),
        Ordering::Greater,
    )
    .map(|r| (r.alpha, &r.summary))
    .ok_or(Error::SharpeUndefined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::contiguous_calendar;
    use chrono::NaiveDate;

    #[test]
    fn default_grid_has_41_points() {
        let g = AlphaGrid::<f64>::default();
        let pts = g.points();
        assert_eq!(pts.len(), 41);
        assert_eq!(g.len(), 41);
        assert_eq!(pts[0], -2.0);
        assert_eq!(pts[20], 0.0);
        assert_eq!(pts[40], 2.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!((pts[26] - 0.6).abs() < 1e-12);

        let g32 = AlphaGrid::<f32>::default();
        assert_eq!(g32.points().len(), 41);
        assert_eq!(g32.points()[40], 2.0);
    }

    #[test]
    fn grid_edge_cases() {
        assert_eq!(AlphaGrid::new(0.0, 0.0, 0.1).unwrap().points(), vec![0.0]);
        assert_eq!(AlphaGrid::new(0.0, 1.0, 0.3).unwrap().points().len(), 4);
        assert!(AlphaGrid::new(1.0, 0.0, 0.1).is_err());
        assert!(AlphaGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(AlphaGrid::new(0.0, 1.0, -0.1).is_err());
        assert!(AlphaGrid::new(0.0, f64::INFINITY, 0.1).is_err());
        assert!(AlphaGrid::new(0.0, 1.0, 1e-12).is_err());
    }

    fn table(alphas: &[f64], stds: &[f64], sharpes: &[Option<f64>]) -> SweepTable<f64> {
        let w = contiguous_calendar(NaiveDate::from_ymd_opt(2024, 1, 7).unwrap(), 2);
        let rows = alphas
            .iter()
            .zip(stds)
            .zip(sharpes)
            .map(|((&alpha, &std_dev), &sharpe)| SweepRow {
                alpha,
                summary: PerformanceSummary {
                    mean_return: 0.0,
                    std_dev,
                    sharpe,
                    n_weeks: 2,
                    cumulative_profit: 0.0,
                    value_path: vec![1.0, 1.0],
                    first_week: w[0],
                    last_week: w[1],
                },
            })
            .collect();
        SweepTable {
            mode: TimingMode::InSample,
            rows,
            skipped: Vec::new(),
        }
    }

    #[test]
    fn min_variance_selection() {
        let t = table(&[-0.1, 0.0, 0.1], &[0.03, 0.02, 0.025], &[Some(1.0); 3]);
        assert_eq!(find_min_variance(&t).unwrap().0, 0.0);

        let tie = table(&[-0.5, 0.5, 1.0], &[0.01, 0.01, 0.02], &[Some(1.0); 3]);
        assert_eq!(find_min_variance(&tie).unwrap().0, -0.5);
        let tie_rev = table(&[-1.0, 0.5, -0.5], &[0.02, 0.01, 0.01], &[Some(1.0); 3]);
        assert_eq!(find_min_variance(&tie_rev).unwrap().0, -0.5);
        let near = table(&[-0.2, 0.1], &[0.01, 0.01], &[Some(1.0); 2]);
        assert_eq!(find_min_variance(&near).unwrap().0, 0.1);

        let single = table(&[1.3], &[0.5], &[None]);
        assert_eq!(find_min_variance(&single).unwrap().0, 1.3);

        let empty = table(&[], &[], &[]);
        assert_eq!(find_min_variance(&empty).unwrap_err(), Error::EmptyTable);
    }

    #[test]
    fn max_sharpe_selection() {
        let t = table(
            &[0.0, 0.5, 1.0],
            &[1.0; 3],
            &[Some(0.05), Some(0.07), Some(0.06)],
        );
        assert_eq!(find_max_sharpe(&t).unwrap().0, 0.5);

        let edge = table(
            &[1.0, 1.5, 2.0],
            &[1.0; 3],
            &[Some(0.01), Some(0.02), Some(0.03)],
        );
        assert_eq!(find_max_sharpe(&edge).unwrap().0, 2.0);

        let flat = table(&[-1.0, 0.0, 1.0], &[1.0; 3], &[Some(0.04); 3]);
        assert_eq!(find_max_sharpe(&flat).unwrap().0, 0.0);

        let partial = table(&[0.0, 1.0], &[0.0, 1.0], &[None, Some(-0.3)]);
        assert_eq!(find_max_sharpe(&partial).unwrap().0, 1.0);
        let none = table(&[0.0], &[0.0], &[None]);
        assert_eq!(find_max_sharpe(&none).unwrap_err(), Error::SharpeUndefined);
    }
}
