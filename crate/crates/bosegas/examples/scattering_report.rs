//! The zero-energy scattering problem for a square well: scattering
//! length against the transcendental closed form, the g-identity
//! `∫ w f = 8π a`, and the finite-ball Dirichlet energies.
//!
//! Run with `cargo run --release --example scattering_report`.

use bosegas::scattering::{
    scattering_energy_ball, solve_scattering, RadialPotential, ScatteringReport,
};

fn main() {
    let w = RadialPotential::square_well(2.0, 1.0).expect("valid well");
    let solution = solve_scattering(&w, 8.0, 1e-12).expect("solvable");
    let exact = 1.0 - 1.0f64.tanh();
    println!("scattering length  a = {:.12}", solution.scattering_length);
    println!("closed form 1-tanh(1) = {:.12}", exact);
    println!("variational energy    = {:.12} (4πa = {:.12})",
        solution.variational_energy, 4.0 * std::f64::consts::PI * solution.scattering_length);
    println!("∫ w f                 = {:.12} (8πa = {:.12})",
        solution.g_integral, 8.0 * std::f64::consts::PI * solution.scattering_length);
    for radius in [1.5, 2.0, 4.0] {
        let ball = scattering_energy_ball(&solution, radius).expect("radius above support");
        println!(
            "ball R = {radius}: quadrature {:.9}  closed form {:.9}  (diff {:.2e})",
            ball.quadrature,
            ball.closed_form,
            (ball.quadrature - ball.closed_form).abs()
        );
    }
    let report = ScatteringReport::new(&solution, None);
    println!("JSON report: {}", serde_json::to_string(&report).unwrap());
}
