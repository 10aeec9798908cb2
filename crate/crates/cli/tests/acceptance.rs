//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;

use bergman_dbar_cli::criteria;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for criterion in criteria::all() {
        match criterion.run(1) {
            Ok(result) => {
                println!("{}", result.line());
                if !result.pass {
                    failed.push(result.id);
                }
            }
            Err(e) => {
                println!("FAIL [{}] {}: {e}", criterion.number, criterion.id);
                failed.push(criterion.id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria::all().len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}
