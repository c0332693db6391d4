use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use wmcs_cli::report::Report;
use wmcs_cli::verify::{self, Suite};
use wmcs_cli::{gallery, scenario, CliError};

#[derive(Parser)]
#[command(name = "wmcs", version, about = "Monotone comparative statics on finite posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        file: PathBuf,
        /// Write report.json and CSV tables here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the facts of a named counterexample, or of all of them.
    Gallery {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(long, default_value = "acceptance")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(report: &Report, out: Option<&Path>) -> Result<ExitCode, CliError> {
    print!("{}", report.render());
    if let Some(dir) = out {
        report.write_to(dir)?;
        println!("wrote {}", dir.join("report.json").display());
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run { file, out } => {
            let start = Instant::now();
            let report = scenario::run_file(&file)?;
            let code = emit(&report, out.as_deref())?;
            println!("elapsed {:.2?}", start.elapsed());
            Ok(code)
        }
        Command::Gallery { name, all, list, out } => {
            if list {
                for n in gallery::names() {
                    println!("{n}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            if name.is_none() && !all {
                return Err(CliError::Schema("name an instance or pass --all (see --list)".into()));
            }
            emit(&gallery::run(name.as_deref())?, out.as_deref())
        }
        Command::Verify { suite, seed, out } => {
            let suite: Suite = suite.parse()?;
            let run = verify::run_suite(suite, seed, |r, t| {
                let mark = if r.pass { "PASS" } else { "FAIL" };
                println!("criterion {:>2}: {mark}  {:<45} {:>8.2?}", r.id, r.title, t);
                if !r.pass {
                    println!("    {}", r.detail);
                }
            });
            let report = run.report();
            if let Some(dir) = &out {
                report.write_to(dir)?;
                println!("wrote {}", dir.join("report.json").display());
            }
            let passed = run.results.iter().filter(|r| r.pass).count();
            println!("{passed} of {} criteria pass", run.results.len());
            Ok(if run.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wmcs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
