//! Command-line front end for `trendfolio-core`: reads price and volume
//! files, sweeps alpha in each timing mode and writes result tables.

pub mod config;
pub mod error;
pub mod input;
pub mod output;
pub mod plot;
pub mod run;

pub use config::{Args, ModeArg, RunConfig, VolumeSource, ZeroPolicyArg};
pub use error::CliError;
pub use run::{run, RunReport};
