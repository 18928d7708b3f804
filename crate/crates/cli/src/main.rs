use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cqm_cli::{registry, run, Overrides};

#[derive(Parser)]
#[command(name = "cqm", version, about = "Run cocyclic mechanics verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments described by a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiplies every tolerance.
        #[arg(long)]
        tol_scale: Option<f64>,
    },
    /// Print the experiment registry.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", registry::list_experiments());
            ExitCode::SUCCESS
        }
        Command::Run { config, seed, out, tol_scale } => match run(&config, &Overrides { seed, out, tol_scale }) {
            Ok(report) => {
                for e in &report.experiments {
                    for c in &e.checks {
                        let verdict = if c.passed { "pass" } else { "FAIL" };
                        let residual = c.residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
                        println!("{verdict} {:<26} {:<36} {residual} < {:.1e}", e.name, c.name, c.tolerance);
                        if let Some(err) = &c.error {
                            println!("     {err}");
                        }
                    }
                }
                println!("{}", if report.passed { "all checks passed" } else { "some checks failed" });
                ExitCode::from(if report.passed { 0 } else { 1 })
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
