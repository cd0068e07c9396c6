use std::process::ExitCode;

use qpstrip::harness::suites::{criterion, SUITE_SEED};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=13 {
        match criterion(id, SUITE_SEED) {
            Ok(c) => {
                println!("{}", c.line());
                if !c.pass {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id:>2} ERROR {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: 13/13 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
