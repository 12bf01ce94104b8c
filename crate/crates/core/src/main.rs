use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use afosmc::cli::{cmd_run, cmd_sweep_memory, cmd_table, CliError};
use afosmc::harness::CaseId;

#[derive(Parser)]
#[command(name = "afosmc", version, about = "Fractional sliding-mode tracking experiments on a simulated ultrasonic motor")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one controller case and write its trace as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// 1: fractional SMC, 2: PID + observer, 3: SMC + observer.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        case: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the MAE/RMSE table of all cases over the configured references.
    Table {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare short-memory windows with full memory and write the sweep as CSV.
    SweepMemory {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, case, out } => {
            let case = CaseId::try_from(case).map_err(CliError::Config)?;
            cmd_run(&config, case, out.as_deref()).map(drop)
        }
        Command::Table { config } => cmd_table(&config).map(drop),
        Command::SweepMemory { config, out } => cmd_sweep_memory(&config, out.as_deref()).map(drop),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
