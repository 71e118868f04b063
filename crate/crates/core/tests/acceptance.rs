//! One line per acceptance criterion. Runs without the test harness so the
//! lines show up in `cargo test` output; exits nonzero if any criterion fails.

use tensorgram::selftest::{criterion, CRITERIA};

fn main() {
    let mut failed = 0;
    for n in 1..=CRITERIA {
        let c = criterion(n);
        println!("{}", c.line());
        for e in &c.report.examples {
            println!("    {e}");
        }
        if !c.passed() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {CRITERIA} criteria pass",
        CRITERIA - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
