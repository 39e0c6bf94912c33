//! Randomized inequality sweeps: Onsager's classical bound, the
//! Hoffmann-Ostenhof kinetic bound on lattices, and Dyson's potential
//! softening lemma. Every gap must be non-negative up to roundoff.
//!
//! Run with `cargo run --release --example inequality_suite`.

use bosegas::harness::experiments::run_inequality_suite;
use bosegas::harness::standalone_provenance;

fn main() {
    let provenance = standalone_provenance("inequality_example", 5);
    let outcome = run_inequality_suite(200, 200, 30, 5, "inequalities", &provenance);
    let gaps = outcome.table.numeric_column("gap");
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("{} instances, smallest gap {min_gap:.3e}", gaps.len());
    println!("verdict: {}", if outcome.passed { "PASS" } else { "FAIL" });
}
