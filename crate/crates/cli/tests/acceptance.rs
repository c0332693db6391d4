//! Runs the full acceptance suite and prints one line per criterion.

use std::process::ExitCode;

use wmcs_cli::verify::{run_suite, Suite};

const SEED: u64 = 7;

fn main() -> ExitCode {
    let run = run_suite(Suite::Acceptance, SEED, |r, t| {
        let mark = if r.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {mark} {} ({} cases, {:.2?})", r.id, r.title, r.cases, t);
        if !r.pass {
            println!("    {}", r.detail);
        }
    });
    let passed = run.results.iter().filter(|r| r.pass).count();
    println!("acceptance: {passed} of {} criteria pass", run.results.len());
    if run.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
