use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use koopman_legendre::cli::{self, SolveOptions, DEFAULT_OUT_DIR, DEFAULT_RK_STEP};
use koopman_legendre::KoopmanError;

/// Solve polynomial ODEs spectrally with a Koopman-Legendre expansion.
#[derive(Parser)]
#[command(name = "koopman", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configured system and write trajectory CSV and summary JSON.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Also integrate with RK4 and add reference and error columns.
        #[arg(long)]
        reference: bool,
        #[arg(long, default_value_t = DEFAULT_RK_STEP)]
        rk_step: f64,
        #[arg(long, default_value = DEFAULT_OUT_DIR)]
        out_dir: PathBuf,
    },
    /// Solve at several expansion orders against one RK4 reference.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `A..B` or a comma-separated list.
        #[arg(long)]
        orders: String,
        #[arg(long, default_value_t = DEFAULT_RK_STEP)]
        rk_step: f64,
        #[arg(long, default_value = DEFAULT_OUT_DIR)]
        out_dir: PathBuf,
    },
    /// Run the built-in consistency checks.
    Validate,
}

fn fail(err: KoopmanError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    match Args::parse().command {
        Command::Solve {
            config,
            reference,
            rk_step,
            out_dir,
        } => {
            let opts = SolveOptions {
                reference,
                rk_step,
                out_dir,
            };
            match cli::run_solve(&config, &opts) {
                Ok(a) => {
                    let s = &a.solution.summary;
                    println!("system {} (m = {}, c = {}, n = {})", s.system, s.m, s.c, s.n);
                    if let Some(e) = s.max_error {
                        println!("max error vs rk4: {e:.3e}");
                    }
                    for w in &s.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!("wrote {}", a.csv.display());
                    println!("wrote {}", a.summary.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep {
            config,
            orders,
            rk_step,
            out_dir,
        } => {
            let orders = match cli::parse_orders(&orders) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            match cli::run_sweep(&config, &orders, rk_step, &out_dir) {
                Ok(a) => {
                    print!("{}", a.report.to_table());
                    println!("wrote {}", a.csv.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate => {
            let report = cli::run_validate();
            print!("{}", report.to_text());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
    }
}
