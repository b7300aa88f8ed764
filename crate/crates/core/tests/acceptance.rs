//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use std::process::ExitCode;

use hstn_core::checks::{self, CheckOptions, CheckOutcome};
use hstn_core::Result;

fn main() -> ExitCode {
    let opts = CheckOptions::default();
    let suite: [&dyn Fn() -> Result<CheckOutcome>; 9] = [
        &checks::psi_oracle_equivalence,
        &|| checks::simulation_agreement(&opts),
        &checks::diversity_orders,
        &checks::scheme_ordering,
        &checks::mode_ordering,
        &checks::lambda_sensitivity,
        &|| checks::distribution_fidelity(&opts),
        &checks::asymptotic_consistency,
        &checks::determinism,
    ];
    let mut failures = Vec::new();
    for (i, check) in suite.iter().enumerate() {
        match check() {
            Ok(outcome) => {
                println!("{}", outcome.line());
                if !outcome.passed {
                    failures.push(outcome.id);
                }
            }
            Err(e) => {
                println!("FAIL criterion {}: error: {e}", i + 1);
                failures.push(i as u32 + 1);
            }
        }
    }
    if failures.is_empty() {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failures:?}");
        ExitCode::FAILURE
    }
}
