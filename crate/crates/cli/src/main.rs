use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use credal_cli::commands;
use credal_core::net::DEFAULT_GENERATOR_CAP;

/// Inference and verification for credal networks under epistemic
/// irrelevance.
#[derive(Debug, Parser)]
#[command(name = "credal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a network is acyclic, complete and locally coherent.
    Validate { net: PathBuf },
    /// Evaluate a file of queries against the joint model.
    Query {
        net: PathBuf,
        queries: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of joint generators.
        #[arg(long, default_value_t = DEFAULT_GENERATOR_CAP)]
        cap: usize,
    },
    /// Check the joint model against its defining requirements.
    Verify {
        net: PathBuf,
        /// Random gambles per checked context.
        #[arg(long, default_value_t = 10)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Validate { net } => commands::validate(net),
        Command::Query { net, queries, seed, cap } => commands::query(net, queries, *seed, *cap),
        Command::Verify { net, budget, seed } => commands::verify(net, *budget, *seed),
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
