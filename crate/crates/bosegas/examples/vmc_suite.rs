//! Variational Monte Carlo for correlated trial states on the torus:
//! a Product state reproduces the Hartree energy, the N = 2 Jastrow run
//! matches the deterministic relative-coordinate quadrature, and the
//! Jastrow gas beats the Product gas on a repulsive GP-scaled well.
//!
//! Run with `cargo run --release --example vmc_suite`.

use bosegas::harness::experiments::run_vmc_suite;
use bosegas::harness::standalone_provenance;
use bosegas::scattering::RadialPotential;

fn main() {
    let w = RadialPotential::square_well(2.0, 1.0).expect("valid well");
    let provenance = standalone_provenance("vmc_example", 9);
    let outcome = run_vmc_suite(
        8,      // particles
        2.0,    // torus side
        &w,     // unscaled potential (GP-scaled internally)
        0.35,   // pair cutoff radius
        4,      // walkers
        8_000,  // sampled sweeps per walker
        1_000,  // burn-in sweeps
        9,
        "vmc",
        &provenance,
    )
    .expect("vmc runs");
    print!("{}", outcome.table.to_csv());
    println!("verdict: {}", if outcome.passed { "PASS" } else { "FAIL" });
}
