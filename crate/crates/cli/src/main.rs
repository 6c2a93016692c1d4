//! `maxfun`: pooling operators, sparse-coding stability trials, and the
//! pooling-comparison classification experiment, driven by JSON configs.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime failure,
//! 3 verification-suite failure.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "maxfun", version, about = "Maxfun pooling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key by dotted path, e.g. `--set trials=500` or
    /// `--set experiment.cv_k=5`. Values parse as JSON.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one pooling operator to an image or feature file.
    Pool(ConfigArgs),
    /// Run seeded stability trials for a layered sparse-coding model.
    #[command(name = "csc-verify")]
    CscVerify(ConfigArgs),
    /// Compare all pooling strategies on an image classification task.
    Classify(ConfigArgs),
    /// Run the built-in verification suites.
    Selftest,
}

fn init_thread_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("MAXFUN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| format!("MAXFUN_THREADS must be a non-negative integer, got {raw:?}"))?;
    if n == 0 {
        return Ok(()); // 0 = automatic
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}

fn main() {
    if let Err(msg) = init_thread_pool() {
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Pool(args) => with_config(args, commands::cmd_pool),
        Command::CscVerify(args) => with_config(args, commands::cmd_csc_verify),
        Command::Classify(args) => with_config(args, commands::cmd_classify),
        Command::Selftest => commands::cmd_selftest(),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {:#}", e.err);
            std::process::exit(e.code);
        }
    }
}

fn with_config(
    args: ConfigArgs,
    run: fn(serde_json::Value) -> commands::CmdResult,
) -> commands::CmdResult {
    let value = config::load_value(&args.config, &args.set).map_err(|err| commands::CliError {
        code: 1,
        err,
    })?;
    run(value)
}
