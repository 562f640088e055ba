//! Runs the Monte Carlo verification suites that check the concentration
//! bounds against simulation: the fictive-test error bound, the additive
//! Chernoff tail, and the random-code minimal-weight bound. Each cell
//! compares a 99% Wilson upper confidence limit (or the exact law, where
//! available) against the claimed bound.
//!
//! Run with: `cargo run --example tail_verification`

use bb84_toolkit::verify::{self, CodeWeightFixture, VerifyError};

fn main() -> Result<(), VerifyError> {
    // Smaller trial counts than the full `bb84 verify` suites so the example
    // finishes in seconds.
    let fictive = verify::mc_fictive_test(0.05, 0.5, 0.2, &[200, 500], 20_000, 11)?;
    println!("{}", fictive.render());

    let chernoff = verify::mc_chernoff(30, 0.3, &[0.05, 0.1, 0.2], 20_000, 12)?;
    println!("{}", chernoff.render());

    let code = verify::mc_code_weight(16, 2, 2, 0.25, 2_000, 13, CodeWeightFixture::RandomF)?;
    println!("{}", code.render());

    let all = fictive.all_pass() && chernoff.all_pass() && code.all_pass();
    println!("overall: {}", if all { "PASS" } else { "FAIL" });
    Ok(())
}
