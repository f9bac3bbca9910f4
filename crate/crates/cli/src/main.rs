use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orlicz_cli::commands::{self, verdict, write_json};
use orlicz_cli::config::{load, Overrides};
use orlicz_cli::report::{summary_table, write_csv};
use orlicz_cli::sweep::sweep;
use orlicz_cli::CliError;

/// Young functions, g-Laplacian eigenvalues and their lower bounds.
#[derive(Debug, Parser)]
#[command(name = "orlicz-spectral", version)]
struct Cli {
    /// Directory for output files (stdout when omitted, except for sweep).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the solver seed of every case.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of elements of every case.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Young-function diagnostics.
    Young {
        #[command(subcommand)]
        command: YoungCommand,
    },
    /// Compute the first eigenvalue at every level of a case.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check every applicable lower bound against the computed eigenvalues.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Verify all cases matching a glob and write a results directory.
    Sweep {
        /// Glob pattern of case files.
        #[arg(long)]
        config: String,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
}

#[derive(Debug, Subcommand)]
enum YoungCommand {
    /// Indices, Δ′ constants, T_g class, critical function and σ samples.
    Inspect {
        #[arg(long)]
        config: PathBuf,
    },
}

fn emit_json<T: serde::Serialize>(out: Option<&Path>, name: &str, value: &T) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_json(&dir.join(name), value)
        }
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
            writeln!(std::io::stdout(), "{text}")?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let o = Overrides {
        seed: cli.seed,
        grid: cli.grid,
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Young {
            command: YoungCommand::Inspect { config },
        } => {
            let report = commands::young_inspect(&load(&config)?)?;
            emit_json(out, "inspect.json", &report)
        }
        Command::Solve { config } => {
            let case = load(&config)?;
            let rows = commands::solve(&case, &o)?;
            let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    write_csv(std::fs::File::create(dir.join("solve.csv"))?, &rows).map_err(csv_err)?
                }
                None => write_csv(std::io::stdout(), &rows).map_err(csv_err)?,
            }
            commands::solve_failure(&rows).map_or(Ok(()), Err)
        }
        Command::Verify { config } => {
            let case = load(&config)?;
            let report = commands::verify(&case, &o)?;
            eprint!("{}", summary_table(&report));
            emit_json(out, "verify.json", &report)?;
            verdict(&report)
        }
        Command::Sweep { config, parallel } => {
            let dir = out.ok_or_else(|| CliError::Config("sweep needs --out DIR".into()))?;
            let summary = sweep(&config, dir, parallel, &o)?;
            let total = summary.manifest.cases.len();
            let failed = summary.failed();
            eprintln!(
                "{total} cases, {failed} failed, {} rows written to {}",
                summary.rows.len(),
                dir.join("cases.csv").display()
            );
            if failed == total {
                Err(CliError::Solver("every case failed".into()))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ORLICZ_SPECTRAL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
