//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Failing criteria are reported but do not fail the target unless
//! `ACCEPTANCE_STRICT=1` is set.

use std::process::ExitCode;

use idregret::suite::run_suite;

fn main() -> ExitCode {
    let outcomes = run_suite(|o| {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {:>2}: {} ({:.1?}) {}", o.id, o.title, o.elapsed, o.summary);
    });
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("acceptance: {} passed, {} failed {:?}", outcomes.len() - failed.len(), failed.len(), failed);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && !failed.is_empty() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
