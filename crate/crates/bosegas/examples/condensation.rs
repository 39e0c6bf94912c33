//! Condensation witness: the normalized reduced density matrices of the
//! toy ground state approach the (phase-averaged) Hartree projector.
//!
//! Run with `cargo run --release --example condensation`.

use bosegas::harness::experiments::run_condensation;
use bosegas::harness::{standalone_provenance, toy_two_mode_model};

fn main() {
    let (h, w) = toy_two_mode_model();
    let provenance = standalone_provenance("condensation_example", 7);
    let outcome =
        run_condensation(&h, &w, &[4, 8, 16, 32, 64], &[1, 2], "condensation", &provenance);
    print!("{}", outcome.table.to_csv());
    println!("verdict: {}", if outcome.passed { "PASS" } else { "FAIL" });
}
