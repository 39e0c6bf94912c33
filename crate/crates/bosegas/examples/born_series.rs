//! Born expansion of the scattering length under `β < 1` scaling: the
//! first-order error decays like N^{β-1} and the higher corrections follow
//! the N^{(β-1)(k-1)} hierarchy.
//!
//! Run with `cargo run --release --example born_series`.

use bosegas::harness::linear_fit;
use bosegas::scattering::{born_series, scale_potential, solve_scattering, PotentialScaling, RadialPotential};

fn main() {
    let w = RadialPotential::square_well(2.0, 1.0).expect("valid well");
    let beta = 0.5;
    let mut pts = Vec::new();
    println!("n, ode_a, s1, s2, s3, rel_err_s1");
    for n in [100usize, 1000, 10_000] {
        let series = born_series(&w, n, beta, 3).expect("series");
        let wn = scale_potential(&w, n, beta, 3, PotentialScaling::FullStrength).unwrap();
        let ode = solve_scattering(&wn, 4.0 * wn.support_radius(), 1e-12)
            .unwrap()
            .scattering_length;
        let rel = ((series.partial_sums[0] - ode) / ode).abs();
        pts.push(((n as f64).ln(), rel.ln()));
        println!(
            "{n}, {ode:.9e}, {:.9e}, {:.9e}, {:.9e}, {rel:.3e}",
            series.partial_sums[0], series.partial_sums[1], series.partial_sums[2]
        );
    }
    let (slope, r2) = linear_fit(&pts);
    println!("first-Born error slope: {slope:.3} (expected β-1 = {:.1}, R² = {r2:.4})", beta - 1.0);
}
