use std::path::PathBuf;
use std::process::ExitCode;

use bellbound::commands::{self, CliError};
use clap::{Parser, Subcommand};

/// Exact CHSH bounds under relaxed parameter independence, and a general
/// parametric quadratic optimizer.
///
/// Exit codes: 0 success, 1 I/O error, 2 parse error, 3 pipeline error,
/// 4 model verification failed, 5 oracle mismatch.
#[derive(Parser, Debug)]
#[command(name = "bellbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Workers {
    /// Worker threads for the optimizer. Output does not depend on it.
    #[arg(long, env = "BELLBOUND_WORKERS")]
    workers: Option<usize>,
}

impl Workers {
    fn get(&self) -> usize {
        use bellbound_core::optimizer::WorkerPool;
        self.workers
            .unwrap_or_else(|| bellbound::runner::Threads::available().workers())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Piecewise optimum over the whole parameter domain.
    Solve {
        /// `oneway`, `twoway`, or a problem file.
        #[arg(long)]
        problem: String,
        #[command(flatten)]
        workers: Workers,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound sampled on an even grid, as CSV.
    Curve {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Add a `tsirelson` column with 2√2.
        #[arg(long)]
        quantum_line: bool,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First PD at which the bound reaches a target.
    Thresholds {
        problem: String,
        /// `tsirelson`, `sqrt(r)`, or a rational.
        #[arg(default_value = "tsirelson")]
        target: String,
        #[command(flatten)]
        workers: Workers,
    },
    /// Check a hidden-variable model at one PD.
    VerifyModel {
        /// `table1`, `table2`, `table3`, `pawlowski:P`, or a model file.
        #[arg(long)]
        model: String,
        #[arg(long)]
        pd: String,
        /// Mix in the outcome-flipped model first.
        #[arg(long)]
        symmetrized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the symbolic bound with the fixed-PD oracle.
    Oracle {
        #[arg(long)]
        problem: String,
        /// Comma-separated rationals.
        #[arg(long)]
        pd: String,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve { problem, workers, out } => commands::cmd_solve(&problem, workers.get(), out.as_deref()),
        Command::Curve {
            problem,
            samples,
            quantum_line,
            workers,
            out,
        } => commands::cmd_curve(&problem, workers.get(), samples, quantum_line, out.as_deref()),
        Command::Thresholds {
            problem,
            target,
            workers,
        } => commands::cmd_thresholds(&problem, &target, workers.get()),
        Command::VerifyModel {
            model,
            pd,
            symmetrized,
            out,
        } => commands::cmd_verify_model(&model, &pd, symmetrized, out.as_deref()),
        Command::Oracle {
            problem,
            pd,
            workers,
            out,
        } => commands::cmd_oracle(&problem, &pd, workers.get(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
