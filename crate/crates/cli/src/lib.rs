//! Configuration, dispatch and output writing behind the `rcbm` binary.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use rcbm_sim::validate::Suite;

pub use config::{parse_config, Overrides, RunConfig};
use output::OutDir;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "RCBM_OUT";

/// Output directory used when neither the flag, the config nor the
/// environment names one.
pub const DEFAULT_OUT: &str = "rcbm-out";

/// A resolved subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    AnalyticEval,
    NdistEval,
    MeasureEval,
    MeasureMc,
    SrptRun,
    Validate(Suite),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::AnalyticEval => "analytic eval".into(),
            Command::NdistEval => "ndist eval".into(),
            Command::MeasureEval => "measure eval".into(),
            Command::MeasureMc => "measure mc".into(),
            Command::SrptRun => "srpt run".into(),
            Command::Validate(s) => format!("validate {}", suite_name(*s)),
        }
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::All => "all",
        Suite::Stationarity => "stationarity",
        Suite::Law2d => "law2d",
        Suite::Ndist => "ndist",
        Suite::Measure => "measure",
        Suite::Srpt => "srpt",
    }
}

/// Runs `cmd` under `cfg` and writes every output. Returns whether all
/// reports passed.
pub fn execute(cmd: Command, cfg: &RunConfig, env_out: Option<PathBuf>) -> Result<bool, String> {
    let name = cmd.name();
    if let Some(want) = &cfg.subcommand {
        let matches = match cmd {
            Command::Validate(_) => want == "validate" || *want == name,
            _ => *want == name,
        };
        if !matches {
            return Err(format!("subcommand: config is for {want:?}, not {name:?}"));
        }
    }
    let root = cfg
        .out
        .clone()
        .or(env_out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut out = OutDir::create(&root)?;
    let threads = cfg.threads.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    let (reports, extra) = pool.install(|| match cmd {
        Command::AnalyticEval => commands::analytic_eval(cfg, &mut out),
        Command::NdistEval => commands::ndist_eval(cfg, &mut out),
        Command::MeasureEval => commands::measure(cfg, &mut out, false),
        Command::MeasureMc => commands::measure(cfg, &mut out, true),
        Command::SrptRun => commands::srpt_run(cfg, &mut out),
        Command::Validate(s) => commands::validate(cfg, &mut out, s),
    })?;
    output::finish(&mut out, &name, cfg, threads, &reports, extra)
}
