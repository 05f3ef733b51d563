//! Reference backtest written as explicit loops.
//!
//! Matrices are `[asset][week]`. Prices and volumes share one calendar of
//! `T` weeks; returns have `T - 1` columns, column `k` ending at price week
//! `k + 1`.

#![allow(clippy::needless_range_loop)]

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    InSample,
    OutOfSample,
}

pub fn weekly_returns(prices: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for row in prices {
        let mut r = Vec::new();
        for t in 1..row.len() {
            r.push((row[t] - row[t - 1]) / row[t - 1]);
        }
        out.push(r);
    }
    out
}

/// `V^-alpha / sum V^-alpha`, evaluated with `powf` directly.
pub fn power_weights(volumes: &[f64], alpha: f64) -> Vec<f64> {
    let mut raw = Vec::new();
    let mut total = 0.0;
    for &v in volumes {
        let x = v.powf(-alpha);
        raw.push(x);
        total += x;
    }
    let mut w = Vec::new();
    for x in raw {
        w.push(x / total);
    }
    w
}

/// Weekly net portfolio returns. Volumes must be strictly positive.
pub fn backtest(
    prices: &[Vec<f64>],
    volumes: &[Vec<f64>],
    alpha: f64,
    mode: Mode,
    cost_rate: f64,
) -> Vec<f64> {
    let n = prices.len();
    let returns = weekly_returns(prices);
    let n_ret = returns[0].len();
    let mut out = Vec::new();
    let mut held: Option<Vec<f64>> = None;
    for k in 0..n_ret {
        let signal = match mode {
            Mode::InSample => k + 1,
            Mode::OutOfSample => k,
        };
        let mut cross = Vec::new();
        for row in volumes {
            cross.push(row[signal]);
        }
        let w = power_weights(&cross, alpha);
        let mut gross = 0.0;
        for i in 0..n {
            gross += w[i] * returns[i][k];
        }
        let mut turnover = 0.0;
        if let Some(prev) = &held {
            for i in 0..n {
                turnover += (w[i] - prev[i]).abs();
            }
            turnover *= 0.5;
        }
        out.push(gross - cost_rate * turnover);
        let mut drifted = Vec::new();
        for i in 0..n {
            drifted.push(w[i] * (1.0 + returns[i][k]) / (1.0 + gross));
        }
        held = Some(drifted);
    }
    out
}

/// Weights applied in each evaluated week.
pub fn weight_history(volumes: &[Vec<f64>], alpha: f64, mode: Mode) -> Vec<Vec<f64>> {
    let n_weeks = volumes[0].len();
    let mut out = Vec::new();
    for k in 0..n_weeks - 1 {
        let signal = match mode {
            Mode::InSample => k + 1,
            Mode::OutOfSample => k,
        };
        let cross: Vec<f64> = volumes.iter().map(|row| row[signal]).collect();
        out.push(power_weights(&cross, alpha));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub sharpe: f64,
    pub cumulative_profit: f64,
}

pub fn stats(returns: &[f64]) -> Stats {
    let n = returns.len() as f64;
    let mut sum = 0.0;
    for r in returns {
        sum += r;
    }
    let mean = sum / n;
    let mut ss = 0.0;
    for r in returns {
        ss += (r - mean) * (r - mean);
    }
    let std = (ss / (n - 1.0)).sqrt();
    let mut value = 1.0;
    for r in returns {
        value *= 1.0 + r;
    }
    Stats {
        mean,
        std,
        sharpe: mean / std,
        cumulative_profit: value - 1.0,
    }
}

/// Grid `min + k * step` for `k = 0..=count-1`, with zero kept exact.
pub fn grid(min: f64, step: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..count {
        let a = min + k as f64 * step;
        out.push(if a.abs() < 1e-9 { 0.0 } else { a });
    }
    out
}

/// Standard deviation of the portfolio at every alpha of `alphas`.
pub fn std_curve(
    prices: &[Vec<f64>],
    volumes: &[Vec<f64>],
    alphas: &[f64],
    mode: Mode,
) -> Vec<f64> {
    alphas
        .iter()
        .map(|&a| stats(&backtest(prices, volumes, a, mode, 0.0)).std)
        .collect()
}

/// Index of the smallest entry; `None` if the minimum is attained twice.
pub fn unique_argmin(xs: &[f64]) -> Option<usize> {
    let mut best = 0;
    for i in 1..xs.len() {
        if xs[i] < xs[best] {
            best = i;
        }
    }
    let ties = xs.iter().filter(|x| **x == xs[best]).count();
    (ties == 1).then_some(best)
}
