//! Scenario-driven command line: one JSON scenario in, CSV or JSON tables out.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 violated theorem hypothesis.

mod execute;
mod scenario;
mod table;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::Parser;
use serde_json::json;

use crate::error::{Error, Result};

pub use execute::execute_scenario;
pub use scenario::{
    parse_config, ImpulseSolveParams, ImpulseVerifyParams, JumpParams, Kind, Parameters, PatternExpectParams,
    PatternParam, PatternRaceParams, RenewalCheckKind, RenewalParams, Scenario, SimulateParams, SourceParams,
};
pub use table::{estimates_table, Cell, Format, Output, Table};

#[derive(Debug, Parser)]
#[command(name = "stochsynth", version, about = "Run a stochastic-analysis scenario")]
pub struct Args {
    /// Scenario document (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the scenario worker count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Output directory; defaults to the scenario's `output`, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Load, run and write; returns the written files.
pub fn run(args: &Args) -> Result<Vec<PathBuf>> {
    let doc = fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut scenario = parse_config(&doc)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(w) = args.workers {
        scenario.workers = w as usize;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(scenario.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", scenario.workers)))?;
    let output = pool.install(|| execute_scenario(&scenario))?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    let dir = args.out.clone().or_else(|| scenario.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let header = json!({ "kind": scenario.kind.as_str(), "seed": scenario.seed });
    table::write_output(&output, &dir, args.format, header)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
