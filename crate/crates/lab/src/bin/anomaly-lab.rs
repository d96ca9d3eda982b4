use std::path::PathBuf;
use std::process::ExitCode;

use anomaly_lab::commands::{cmd_linearize, cmd_run, cmd_stationary, cmd_sweep, cmd_verify, Exit};
use anomaly_lab::verify::Level;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "anomaly-lab", version, about = "Anomaly flow on three-dimensional complex Lie groups")]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "ANOMALY_LAB_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario; writes the trajectory CSV and a JSON summary.
    Run { scenario: PathBuf },
    /// Newton search for a stationary metric from the scenario's initial metric.
    Stationary { scenario: PathBuf },
    /// Jacobian and spectrum of the flow at the scenario's initial metric.
    Linearize { scenario: PathBuf },
    /// Run a grid of scenarios concurrently; one CSV row per cell.
    Sweep { sweep: PathBuf },
    /// Run the acceptance checks and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out_dir.as_path();
    let result = match &cli.command {
        Command::Run { scenario } => cmd_run(scenario, out),
        Command::Stationary { scenario } => cmd_stationary(scenario, out),
        Command::Linearize { scenario } => cmd_linearize(scenario, out),
        Command::Sweep { sweep } => cmd_sweep(sweep, out),
        Command::Verify { level, seed } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            cmd_verify(level, *seed, Some(out))
        }
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Exit::Failed as u8)
        }
    }
}
