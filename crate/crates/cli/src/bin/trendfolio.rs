use std::process::ExitCode;

use clap::Parser;
use trendfolio_cli::{run, Args, RunConfig};

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = RunConfig::try_from(args).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for (mode, min_var, max_sharpe) in &report.selections {
                let sharpe = max_sharpe.map_or("undefined".to_string(), |a| a.to_string());
                println!("{mode}: min-variance alpha {min_var}, max-Sharpe alpha {sharpe}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
