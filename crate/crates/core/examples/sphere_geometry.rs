//! Explores the Hamming-sphere geometry behind the security argument:
//! exact sphere sizes, their entropy-based two-sided bounds, and the
//! smallest-sphere-radius computation for states prepared in conjugate
//! bases.
//!
//! Run with: `cargo run --example sphere_geometry`

use bb84_toolkit::gf2codes::{self, BitVec};
use bb84_toolkit::protocol::Basis;
use bb84_toolkit::quantum;

fn main() {
    // |{w : weight(w) < d}| and its 2^{nH(d/n)}-style bounds.
    println!("sphere sizes and entropy bounds:");
    for (n, d) in [(10, 3), (16, 5), (24, 8)] {
        let exact = gf2codes::sphere_size(n, d);
        let (lower, upper) = gf2codes::sphere_entropy_bounds(n, d).unwrap();
        println!(
            "  n={n:2} d={d}: |sphere| = {exact:8}  bounds [{lower:12.1}, {upper:12.1}]"
        );
        assert!(lower <= exact as f64 && exact as f64 <= upper);
    }

    // A word prepared in one basis, expanded in the conjugate basis, spreads
    // over the whole cube: its smallest sphere radius around any reference
    // word is maximal on the flipped positions.
    let n = 5;
    let h = BitVec::parse("01101").unwrap();
    let prep = vec![Basis::Plus; n];
    let mut meas = prep.clone();
    meas[1] = Basis::Times;
    meas[3] = Basis::Times;
    let phi = quantum::bb84_state(&h, &prep).unwrap();
    let x_set: Vec<usize> = (0..n).collect();
    let radius = quantum::ssp_min_radius(&phi, &h, &meas, &x_set).unwrap();
    println!("\nsmallest sphere radius with two conjugate measurement bases: {radius}");
    println!("(support spreads uniformly over both flipped positions: radius = 1 + 2)");

    // Projection onto the far region of a sphere is a genuine projector;
    // an empty parity check leaves the mixture maximally mixed.
    let proj = quantum::sphere_projection(2, &h, &meas, &x_set).unwrap();
    let f_empty = gf2codes::BitMatrix::empty(n);
    let rho =
        quantum::rho_brute(Some(&f_empty), None, &BitVec::zeros(0), &BitVec::zeros(0), &prep)
            .unwrap();
    let (projected, total) = quantum::projected_overlap(&phi, &rho, &proj).unwrap();
    println!("projected overlap {projected:.6} <= total overlap {total:.6}");
}
