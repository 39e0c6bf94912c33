//! Bogoliubov Hamiltonians: the closed-form ground energy
//! `(1/2) Tr(E - H)` against a truncated-Fock oracle, the -(1/2)Tr(H⁻¹K²)
//! lower bound, and the Wick rule on a thermal quasi-free state.
//!
//! Run with `cargo run --release --example bogoliubov_suite`.

use bosegas::bogoliubov::{
    bogoliubov_brute_force, bogoliubov_ground_energy, bogoliubov_lower_bound,
    wick_expectation, QuadraticHamiltonian, QuasiFreeState,
};
use bosegas::fock::LadderMonomial;

fn main() {
    let qh = QuadraticHamiltonian::one_mode(2.0, 1.0).unwrap();
    let closed = bogoliubov_ground_energy(&qh);
    println!("one mode H = 2, K = 1:");
    println!("  closed form     {:.12}", closed.ground_energy);
    println!("  exact           {:.12}", (3f64.sqrt() - 2.0) / 2.0);
    let oracle = bogoliubov_brute_force(&qh, 40).unwrap();
    for (cap, e) in &oracle.by_cap {
        println!("  truncated cap {cap:>2}: {e:.12}");
    }
    println!("  extrapolated    {:.12}", oracle.extrapolated);
    println!("  lower bound     {:.12}", bogoliubov_lower_bound(&qh).unwrap());
    // Wick rule on a diagonal thermal state
    let state = QuasiFreeState::thermal_diagonal(&[0.9]);
    let quartic = LadderMonomial::normal(vec![0, 0], vec![0, 0]);
    println!(
        "thermal <a†a†aa> with n = 0.9: {} (Wick rule gives 2n² = {})",
        wick_expectation(&state, &quartic).unwrap().re,
        2.0 * 0.81
    );
}
