//! Runs the fast verification suites and prints one line per check.

use green_teich::config::RunConfig;
use green_teich::error::Result;
use green_teich::verify::{run, VerifyOptions};

fn main() -> Result<()> {
    let cfg = RunConfig::default();
    for suite in ["eq2", "lemma2", "theorem3", "hyperconvex"] {
        for outcome in run(suite, &VerifyOptions::default(), &cfg)? {
            for check in &outcome.checks {
                println!("{} {}/{}", if check.pass { "PASS" } else { "FAIL" }, outcome.suite, check.name);
            }
        }
    }
    Ok(())
}
