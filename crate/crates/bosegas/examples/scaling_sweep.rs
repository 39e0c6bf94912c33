//! Mean-field convergence on a two-mode toy model: E(N)/N climbs toward
//! the finite-mode Hartree minimum as the particle number grows, and the
//! gap closes like 1/N.
//!
//! Run with `cargo run --release --example scaling_sweep`.

use bosegas::harness::experiments::run_scaling_sweep;
use bosegas::harness::{gap_fit, standalone_provenance, toy_two_mode_model};

fn main() {
    let (h, w) = toy_two_mode_model();
    let provenance = standalone_provenance("scaling_sweep_example", 7);
    let outcome = run_scaling_sweep(&h, &w, &[4, 8, 16, 32, 64], 1e-10, "toy_sweep", &provenance);
    print!("{}", outcome.table.to_csv());
    if let Some((slope, r2)) = gap_fit(&outcome.table) {
        println!("gap ~ N^{slope:.3}   (R² = {r2:.4})");
    }
    println!("verdict: {}", if outcome.passed { "PASS" } else { "FAIL" });
}
