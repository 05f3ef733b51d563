//! Test support for trendfolio: a straight-line reference implementation of
//! the backtest arithmetic and deterministic synthetic datasets.
//!
//! Nothing here depends on `trendfolio-core`; the oracle works on plain
//! nested vectors so it can check the engine from the outside.

pub mod fixtures;
pub mod oracle;
