//! Runs every numbered reproduction check and prints one line per check.
//! Exits nonzero if any check fails.

use std::process::ExitCode;

use sma_cli::acceptance::{run, Solves, ALL};

const SEED: u64 = 20240601;

fn main() -> ExitCode {
    let mut solves = Solves::default();
    let mut failed = Vec::new();
    for id in ALL {
        match run(id, SEED, &mut solves) {
            Ok(o) => {
                println!("{}", o.line());
                if !o.pass {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id:>2} FAIL  error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria pass", ALL.len());
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
