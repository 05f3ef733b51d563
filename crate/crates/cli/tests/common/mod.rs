#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use trendfolio_testkit::fixtures::{benchmark_csv, prices_csv, volumes_csv, RawPanel};

/// Input files for one run, written into a temporary directory.
pub struct Inputs {
    pub dir: tempfile::TempDir,
    pub prices: PathBuf,
    pub volumes: PathBuf,
    pub benchmark: PathBuf,
}

impl Inputs {
    pub fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

pub fn write_inputs(panel: &RawPanel) -> Inputs {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("prices.csv");
    let volumes = dir.path().join("volumes.csv");
    let benchmark = dir.path().join("index.csv");
    fs::write(&prices, prices_csv(panel)).unwrap();
    fs::write(&volumes, volumes_csv(panel)).unwrap();
    fs::write(
        &benchmark,
        benchmark_csv("IDX", panel.first_week, &panel.index_levels()),
    )
    .unwrap();
    Inputs {
        dir,
        prices,
        volumes,
        benchmark,
    }
}

/// Runs the installed binary with `args`.
pub fn trendfolio(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trendfolio"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().expect("binary runs")
}

/// Runs on merged volumes with the benchmark, default grid and both modes.
pub fn run_default(inputs: &Inputs, out: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<&dyn AsRef<std::ffi::OsStr>> = vec![
        &"--prices",
        &inputs.prices,
        &"--volumes",
        &inputs.volumes,
        &"--benchmark",
        &inputs.benchmark,
        &"--out",
        &out,
    ];
    for e in extra {
        args.push(e);
    }
    trendfolio(&args)
}

/// Every file of `dir` by name.
pub fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}
