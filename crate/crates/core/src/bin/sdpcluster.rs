use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sdpcluster::harness::{self, Algorithm, ExperimentPlan, Mode};
use sdpcluster::Error;

#[derive(Parser)]
#[command(name = "sdpcluster", version, about = "Two-population clustering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success-rate sweep over an (n, p) grid.
    Sweep(Common),
    /// Angle and Z-distance study over an (n, p) grid.
    Angles(Common),
    /// Fixed-size verification suite.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON plan; its keys override the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Comma-separated subset of sdp,spectral_pw,spectral_sign.
    #[arg(long, value_delimiter = ',')]
    algo: Option<Vec<String>>,
}

enum Failure {
    Config(Error),
    Run(Error),
    Verification(usize),
}

fn plan_for(mode: Mode, c: &Common) -> Result<ExperimentPlan, Error> {
    let mut plan = match &c.config {
        Some(path) => ExperimentPlan::from_json_over_defaults(mode, &std::fs::read_to_string(path)?)?,
        None => ExperimentPlan::defaults(mode),
    };
    plan.mode = mode;
    if let Some(seed) = c.seed {
        plan.master_seed = seed;
    }
    if let Some(t) = c.threads {
        plan.threads = Some(t);
    }
    if let Some(algos) = &c.algo {
        plan.algorithms = algos.iter().map(|a| Algorithm::parse(a)).collect::<Result<_, _>>()?;
    }
    if let Some(out) = &c.out {
        plan.output_path = Some(out.clone());
    }
    plan.validate()?;
    Ok(plan)
}

fn sink(plan: &ExperimentPlan) -> Result<Box<dyn Write>, Error> {
    Ok(match &plan.output_path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (mode, common) = match &cli.command {
        Command::Sweep(c) => (Mode::Sweep, c),
        Command::Angles(c) => (Mode::Angles, c),
        Command::Verify(c) => (Mode::Verify, c),
    };
    let plan = plan_for(mode, common).map_err(Failure::Config)?;
    match mode {
        Mode::Sweep => {
            let rows = harness::run_sweep(&plan).map_err(Failure::Run)?;
            harness::write_rows(sink(&plan).map_err(Failure::Run)?, &rows).map_err(Failure::Run)
        }
        Mode::Angles => {
            let rows = harness::run_angles(&plan).map_err(Failure::Run)?;
            harness::write_rows(sink(&plan).map_err(Failure::Run)?, &rows).map_err(Failure::Run)
        }
        Mode::Verify => {
            let report = harness::run_verify(plan.master_seed).map_err(Failure::Run)?;
            report.write_csv(sink(&plan).map_err(Failure::Run)?).map_err(Failure::Run)?;
            let failed = report.failures();
            for row in &failed {
                eprintln!("FAIL {} [{}]: {} > {}", row.check, row.spec, row.statistic, row.bound);
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verification(failed.len()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(k)) => {
            eprintln!("{k} verification check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("invalid configuration: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
