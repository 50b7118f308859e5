use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rcbm_cli::{execute, parse_config, Command, Overrides, OUT_ENV};
use rcbm_sim::validate::Suite;

/// Stationary laws of reflecting coupled Brownian motions: closed forms,
/// Monte Carlo checks and an SRPT queue simulator.
///
/// Settings come from a TOML file (--config) with every key optional;
/// flags override the file. Unknown keys are errors. Outputs (CSV, JSON
/// summary, manifest, plot data) go to --out, else the config's `out`, else
/// $RCBM_OUT, else ./rcbm-out.
#[derive(Parser, Debug)]
#[command(name = "rcbm", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Path-simulation time step [default: per subcommand].
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Monte Carlo replicates [default: per subcommand].
    #[arg(long, global = true)]
    n: Option<usize>,
    #[command(subcommand)]
    cmd: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    /// Closed-form laws of the maximum process.
    Analytic {
        #[command(subcommand)]
        cmd: AnalyticCmd,
    },
    /// n-point joint law of the maximum process.
    Ndist {
        #[command(subcommand)]
        cmd: NdistCmd,
    },
    /// Total mass of the stationary queue measure.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// Discrete-event SRPT queue.
    Srpt {
        #[command(subcommand)]
        cmd: SrptCmd,
    },
    /// Monte Carlo validation suites; exit status 1 when a check fails.
    Validate {
        /// all, stationarity, law2d, ndist, measure or srpt.
        suite: Suite,
    },
}

#[derive(Subcommand, Debug)]
enum AnalyticCmd {
    /// Running-max CDFs on grids.a × grids.t × grids.x, 2-d joint CDFs and covariances.
    Eval,
}

#[derive(Subcommand, Debug)]
enum NdistCmd {
    /// Reduce the [ndist] constraints, evaluate the law and simulate it; export the envelope.
    Eval,
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    /// Closed-form mean and variance of the total mass.
    Eval,
    /// Closed forms beside Monte Carlo estimates.
    Mc,
}

#[derive(Subcommand, Debug)]
enum SrptCmd {
    /// Simulate the [srpt] queue and write snapshots and a summary.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.cmd {
        Top::Analytic {
            cmd: AnalyticCmd::Eval,
        } => Command::AnalyticEval,
        Top::Ndist {
            cmd: NdistCmd::Eval,
        } => Command::NdistEval,
        Top::Measure {
            cmd: MeasureCmd::Eval,
        } => Command::MeasureEval,
        Top::Measure {
            cmd: MeasureCmd::Mc,
        } => Command::MeasureMc,
        Top::Srpt { cmd: SrptCmd::Run } => Command::SrptRun,
        Top::Validate { suite } => Command::Validate(suite),
    };
    let overrides = Overrides {
        seed: cli.seed,
        n: cli.n,
        dt: cli.dt,
        threads: cli.threads,
        out: cli.out,
    };
    let env_out = std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let result = parse_config(cli.config.as_deref()).and_then(|mut cfg| {
        cfg.apply(&overrides)?;
        execute(cmd, &cfg, env_out)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("rcbm: some checks failed; see summary.json");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("rcbm: {e}");
            ExitCode::from(2)
        }
    }
}
