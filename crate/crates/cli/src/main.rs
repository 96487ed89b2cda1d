mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{OverflowError, SelftestFailed};
use config::{invalid, Command, ConfigArgs, ConfigError, ExperimentConfig};

/// Z2/Z4 toric, twisted and double-semion stabilizer experiments.
#[derive(Parser)]
#[command(name = "ztwist", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Generator counts and logical dimension.
    Info(ConfigArgs),
    /// Code distance, overall and per logical class.
    Distance(ConfigArgs),
    /// Monte Carlo logical failure rate of the condensate decoder.
    DecodeBench(ConfigArgs),
    /// Reflection and conjugacy-class lifetime experiment.
    Scatter(ConfigArgs),
    /// Fast invariant checks.
    Selftest(ConfigArgs),
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("ZTWIST_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| invalid(format!("ZTWIST_THREADS=`{v}` is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let (command, args) = match cli.command {
        Sub::Info(a) => (Command::Info, a),
        Sub::Distance(a) => (Command::Distance, a),
        Sub::DecodeBench(a) => (Command::DecodeBench, a),
        Sub::Scatter(a) => (Command::Scatter, a),
        Sub::Selftest(a) => (Command::Selftest, a),
    };
    let cfg = ExperimentConfig::resolve(command, args)?;
    commands::run(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = if e.downcast_ref::<ConfigError>().is_some() {
                ("invalid-config", 2)
            } else if e.downcast_ref::<OverflowError>().is_some() {
                ("enumeration-overflow", 3)
            } else if e.downcast_ref::<SelftestFailed>().is_some() {
                ("selftest-failed", 1)
            } else {
                ("runtime", 1)
            };
            let diag = json!({ "error": { "kind": kind, "message": format!("{e:#}") } });
            eprintln!("{diag}");
            ExitCode::from(code)
        }
    }
}
