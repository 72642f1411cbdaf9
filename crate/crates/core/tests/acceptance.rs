//! Runs the ten acceptance checks and prints one line per check.
//!
//! `cargo test -p fcev-core --test acceptance` exits non-zero if any fails.
//! Pass check numbers as arguments to run a subset.

use fcev::acceptance::{run_check, CheckOptions};

fn main() {
    // ignore libtest-style flags forwarded by `cargo test`
    let ids: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .filter(|id| (1..=10).contains(id))
        .collect();
    let ids = if ids.is_empty() { (1..=10).collect() } else { ids };

    let opts = CheckOptions::default();
    let mut failed = 0;
    for id in ids {
        let outcome = run_check(id, &opts);
        println!("{}", outcome.summary_line());
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} check(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all checks passed");
}
