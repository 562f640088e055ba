//! Exhaustively enumerates every branch of a tiny noiseless protocol with
//! exact rational arithmetic and computes the information leakage from Eve's
//! view to the final key. For a passive Eve the leakage is structurally
//! zero; crediting Eve with Alice's full bit string gives the omniscient
//! ceiling E[m].
//!
//! Run with: `cargo run --example exact_leakage`

use bb84_toolkit::gf2codes::BitMatrix;
use bb84_toolkit::protocol::AttackStrategy;
use bb84_toolkit::quantum::{QuantumError, TinyProtocol, exhaustive_leakage};

fn main() -> Result<(), QuantumError> {
    let base = TinyProtocol {
        n_photons: 3,
        p_t: 0.5,
        delta: 0.5,
        f: BitMatrix::parse_rows(&["11"]).unwrap(),
        k: BitMatrix::parse_rows(&["10"]).unwrap(),
        attack: AttackStrategy::None,
        eve_knows_g: false,
    };

    let passive = exhaustive_leakage(&base)?;
    println!(
        "passive Eve      : leakage = {:.6} bits (structurally zero: {}), \
         p_accept = {:.6}, {} branches, {} views",
        passive.leakage_bits,
        passive.exactly_zero,
        passive.p_accept,
        passive.branches,
        passive.views.len()
    );

    let intercept = exhaustive_leakage(&TinyProtocol {
        attack: AttackStrategy::InterceptResend { p_attack: 1.0 },
        ..base.clone()
    })?;
    println!(
        "intercept-resend : leakage = {:.6} bits, p_accept = {:.6}, {} branches",
        intercept.leakage_bits, intercept.p_accept, intercept.branches
    );

    let omniscient = exhaustive_leakage(&TinyProtocol {
        eve_knows_g: true,
        ..base.clone()
    })?;
    let expected_m: f64 = omniscient.p_m.iter().map(|&(m, p)| m as f64 * p).sum();
    println!(
        "omniscient Eve   : leakage = {:.6} bits = E[m] = {:.6} (ceiling)",
        omniscient.leakage_bits, expected_m
    );
    Ok(())
}
