//! Coherent-state symbol calculus: upper vs lower symbols of quartic
//! polynomials, the exact heat-flow round trip, and the one-mode
//! anti-Wick/Wick shift `a a† - a†a = 1`.
//!
//! Run with `cargo run --release --example symbol_calculus`.

use bosegas::definetti::{
    heat_forward, quantize, upper_symbol, QuantizationOrder, SymbolPolynomial,
};
use bosegas::fock::{LadderMonomial, TruncatedFockBasis};
use num_complex::Complex64;

fn main() {
    // a†a†aa -> |z|⁴ - 4|z|² + 2
    let quartic = SymbolPolynomial::from_monomial(
        1,
        &LadderMonomial::normal(vec![0, 0], vec![0, 0]),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    let up = upper_symbol(&quartic);
    println!("lower symbol of a†a†aa at |z|² = t is t²");
    println!("upper symbol coefficients:");
    for (alpha, beta, c) in up.terms() {
        println!("  (a†)^{alpha:?} a^{beta:?}: {c}");
    }
    let roundtrip = heat_forward(&up);
    println!(
        "heat-flow roundtrip max coefficient error: {:.2e}",
        roundtrip.max_coefficient_diff(&quartic)
    );
    // Wick vs anti-Wick of |z|² on a truncated Fock space
    let number = SymbolPolynomial::from_monomial(
        1,
        &LadderMonomial::number(0),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    let basis = TruncatedFockBasis::new(1, 8).unwrap();
    let wick = quantize(&number, &basis, QuantizationOrder::Wick);
    let anti = quantize(&number, &basis, QuantizationOrder::AntiWick);
    let diff = &anti - &wick;
    println!("anti-Wick - Wick of |z|² (should be the identity):");
    for i in 0..4 {
        println!("  diagonal[{i}] = {}", diff[(i, i)].re);
    }
}
