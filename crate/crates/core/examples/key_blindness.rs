//! Demonstrates key blindness: a probe state whose smallest sphere radius
//! (measured in the conjugate of the preparation bases) stays within the
//! minimal weight d_W of the key-relevant row-space difference
//! G* = rowspace[F;K] − rowspace[F] has the same overlap with Eve's
//! conditional state for every key value. A probe reaching out to distance
//! d_W (the negative control) breaks the tie.
//!
//! Run with: `cargo run --example key_blindness`

use bb84_toolkit::gf2codes::{self, BitMatrix, BitVec};
use bb84_toolkit::protocol::Basis;
use bb84_toolkit::quantum::{self, QuantumError};

fn main() -> Result<(), QuantumError> {
    let n = 7;
    let f = BitMatrix::parse_rows(&["1110000", "0011100"]).unwrap();
    let k_mat = BitMatrix::parse_rows(&["1111111"]).unwrap();
    let d_w = gf2codes::minimal_weight_dw(&f, &k_mat).unwrap();
    println!("d_W(F, K) = {d_w}");

    let prep = vec![Basis::Plus; n];
    let conj: Vec<Basis> = prep.iter().map(|b| b.conjugate()).collect();
    let s = BitVec::parse("10").unwrap();
    let h = BitVec::zeros(n);
    let x_set: Vec<usize> = (0..n).collect();

    let spread = |overlaps: &[f64]| -> f64 {
        overlaps.iter().cloned().fold(f64::MIN, f64::max)
            - overlaps.iter().cloned().fold(f64::MAX, f64::min)
    };

    // Narrow probe: superposition of conjugate-basis words within distance 1
    // of h, so its smallest sphere radius is 2 < d_W.
    let mut narrow = quantum::bb84_state(&h, &conj)?;
    for i in 0..3 {
        let mut flipped = h.clone();
        flipped.set(i, !flipped.get(i));
        narrow = narrow.add(&quantum::bb84_state(&flipped, &conj)?)?;
    }
    let narrow = narrow.normalized()?;
    let radius = quantum::ssp_min_radius(&narrow, &h, &conj, &x_set)?;
    let overlaps = quantum::key_overlaps(&narrow, &f, &k_mat, &s, &prep)?;
    println!(
        "narrow probe: radius = {radius}, overlap spread over keys = {:.3e} (blind)",
        spread(&overlaps)
    );

    // Negative control: include a word at the full distance d_W — here the
    // minimal-weight G* member 0010011 — and the overlaps split by key.
    let far = BitVec::parse("0010011").unwrap();
    assert_eq!(far.weight(), d_w);
    let wide = quantum::bb84_state(&h, &conj)?
        .add(&quantum::bb84_state(&far, &conj)?)?
        .normalized()?;
    let radius = quantum::ssp_min_radius(&wide, &h, &conj, &x_set)?;
    let overlaps = quantum::key_overlaps(&wide, &f, &k_mat, &s, &prep)?;
    println!(
        "wide probe:   radius = {radius}, overlaps per key = {overlaps:?} (not blind)"
    );
    Ok(())
}
