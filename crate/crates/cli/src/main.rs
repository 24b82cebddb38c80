//! `maxklin`: generate, solve, simulate, verify, and sweep.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use maxklin_core::Error;

/// Exit codes: 0 success, 1 internal error, 2 input error, 3 resource-limit
/// refusal.
#[derive(Debug)]
pub struct AppError {
    pub code: u8,
    pub message: String,
}

impl AppError {
    pub fn internal(message: impl Into<String>) -> Self {
        AppError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        AppError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Input(_) | Error::Generation(_) => 2,
            Error::Limit(_) => 3,
            Error::Contract(_) | Error::Degenerate(_) | Error::Propagation(_) | Error::Io(_) => 1,
        };
        AppError {
            code,
            message: e.to_string(),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

#[derive(Parser)]
#[command(
    name = "maxklin",
    version,
    about = "MAX-K-LIN-2 generators, the improve-or-witness classical solver, \
             brute-force oracles, and an exact quench simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for parallel commands (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(commands::gen::GenArgs),
    /// Run the amplified classical solver on an instance.
    Solve(commands::solve::SolveArgs),
    /// Run the quench simulator and record the trace.
    Quench(commands::quench_cmd::QuenchArgs),
    /// Brute-force optima, force moments, extreme-value scans.
    Oracle(commands::oracle_cmd::OracleArgs),
    /// Run a benchmark sweep from a config file.
    Bench(commands::bench::BenchArgs),
}

/// Statevector qubit limit, overridable through MAXKLIN_QUBIT_LIMIT.
pub fn qubit_limit() -> usize {
    std::env::var("MAXKLIN_QUBIT_LIMIT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(maxklin_core::quench::DEFAULT_QUBIT_LIMIT)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    let result = match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Solve(args) => commands::solve::run(args),
        Command::Quench(args) => commands::quench_cmd::run(args),
        Command::Oracle(args) => commands::oracle_cmd::run(args),
        Command::Bench(args) => commands::bench::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
