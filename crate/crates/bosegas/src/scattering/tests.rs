use super::*;
use approx::assert_abs_diff_eq;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

/// Analytic square-well scattering length: a = R (1 - tanh(κR)/(κR)),
/// κ = sqrt(V0/2).
fn square_well_a(v0: f64, r0: f64) -> f64 {
    let kappa = (v0 / 2.0).sqrt();
    r0 - (kappa * r0).tanh() / kappa
}

#[test]
fn zero_potential_is_trivial() {
    let w = RadialPotential::square_well(0.0, 1.0).unwrap();
    let s = solve_scattering(&w, 4.0, 1e-10).unwrap();
    assert_eq!(s.scattering_length, 0.0);
    assert_eq!(s.variational_energy, 0.0);
    assert!((s.f(0.3) - 1.0).abs() < 1e-15);
}

#[test]
fn square_well_matches_transcendental_formula() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 6.0, 1e-12).unwrap();
    let exact = 1.0 - 1.0f64.tanh(); // κ = 1
    assert!(
        (s.scattering_length - exact).abs() < 1e-8,
        "a = {} vs exact {}",
        s.scattering_length,
        exact
    );
    assert_abs_diff_eq!(square_well_a(2.0, 1.0), exact, epsilon = 1e-15);
}

#[test]
fn exterior_form_is_exact() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 6.0, 1e-12).unwrap();
    let a = s.scattering_length;
    for r in [1.0f64, 1.5, 2.5, 5.0] {
        assert!((s.f(r) - (1.0 - a / r)).abs() <= 1e-8);
    }
}

#[test]
fn energy_and_g_identities() {
    for w in [
        RadialPotential::square_well(2.0, 1.0).unwrap(),
        RadialPotential::bump(3.0, 1.2).unwrap(),
        RadialPotential::parabolic(4.0, 0.8).unwrap(),
    ] {
        let s = solve_scattering(&w, 8.0, 1e-12).unwrap();
        let a = s.scattering_length;
        assert!(
            (s.variational_energy - 4.0 * PI * a).abs() < 1e-6,
            "variational energy {} vs 4πa {}",
            s.variational_energy,
            4.0 * PI * a
        );
        assert!(
            (s.g_integral - 8.0 * PI * a).abs() < 1e-6,
            "∫wf = {} vs 8πa = {}",
            s.g_integral,
            8.0 * PI * a
        );
        // strict Born inequality: 8πa < ∫w for any nonzero repulsive w
        assert!(8.0 * PI * a < w.integral_3d());
    }
}

#[test]
fn f_is_between_zero_and_one_and_monotone_envelope() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 6.0, 1e-12).unwrap();
    for i in 0..=300 {
        let r = 3.0 * i as f64 / 300.0;
        let f = s.f(r);
        assert!(f >= -1e-12 && f <= 1.0 + 1e-12, "f({r}) = {f} out of [0,1]");
    }
}

#[test]
fn ball_energy_examples() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 8.0, 1e-12).unwrap();
    let a = s.scattering_length;
    for radius in [1.5f64, 2.0, 4.0] {
        let ball = scattering_energy_ball(&s, radius).unwrap();
        let expect = 4.0 * PI * a / (1.0 - a / radius);
        assert_abs_diff_eq!(ball.closed_form, expect, epsilon = 1e-12);
        assert!(
            (ball.quadrature - ball.closed_form).abs() < 1e-6,
            "R={radius}: quad {} vs closed {}",
            ball.quadrature,
            ball.closed_form
        );
        // boundary condition f_R(R) = 1 exactly
        let last = ball.f_samples.last().unwrap();
        assert_abs_diff_eq!(last.1, 1.0, epsilon = 1e-10);
    }
    // R -> ∞ limit tends to 4πa from above
    let big = scattering_energy_ball(&s, 500.0).unwrap();
    assert!((big.closed_form - 4.0 * PI * a).abs() < 1e-2 * 4.0 * PI * a);
    assert!(scattering_energy_ball(&s, 0.5).is_err());
}

#[test]
fn gp_scaling_halves_scattering_length_per_n() {
    // d = 3, β = 1: a_{w_N} = a_w / N, verified by re-solving the ODE
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let a = solve_scattering(&w, 6.0, 1e-12).unwrap().scattering_length;
    for n in [4usize, 16] {
        let wn = scale_potential(&w, n, 1.0, 3, PotentialScaling::FullStrength).unwrap();
        assert_abs_diff_eq!(wn.support_radius(), 1.0 / n as f64, epsilon = 1e-15);
        let an = solve_scattering(&wn, 6.0 / n as f64, 1e-12)
            .unwrap()
            .scattering_length;
        assert!(
            ((an - a / n as f64) / (a / n as f64)).abs() <= 1e-6,
            "N={n}: a_N = {an} vs a/N = {}",
            a / n as f64
        );
    }
}

#[test]
fn beta_zero_scaling_keeps_shape() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let wn = scale_potential(&w, 10, 0.0, 3, PotentialScaling::PairBookkept).unwrap();
    assert_abs_diff_eq!(wn.amp, w.amp, epsilon = 1e-15);
    assert_abs_diff_eq!(wn.support_radius(), w.support_radius(), epsilon = 1e-15);
}

#[test]
fn first_born_term_of_unscaled_square_well() {
    // (8π)^{-1} ∫w = V0 R0³ / 6 = 1/3 for V0 = 2, R0 = 1
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let first = w.integral_3d() / (8.0 * PI);
    assert_abs_diff_eq!(first, 1.0 / 3.0, epsilon = 1e-7);
}

#[test]
fn born_partial_sums_approach_the_ode_value() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let n = 1000usize;
    let beta = 0.5;
    let series = born_series(&w, n, beta, 4).unwrap();
    let wn = scale_potential(&w, n, beta, 3, PotentialScaling::FullStrength).unwrap();
    let ode = solve_scattering(&wn, 4.0 * wn.support_radius(), 1e-12)
        .unwrap()
        .scattering_length;
    // a < first Born term, strictly
    assert!(ode < series.partial_sums[0]);
    // successive partial sums improve
    let errors: Vec<f64> = series
        .partial_sums
        .iter()
        .map(|s| ((s - ode) / ode).abs())
        .collect();
    for k in 1..errors.len() {
        assert!(
            errors[k] < errors[k - 1],
            "partial sum {k} did not improve: {errors:?}"
        );
    }
    // term-size hierarchy: t_{k+1}/t_k ~ N^{β-1}
    let ratio1 = series.terms[1] / series.terms[0];
    let ratio2 = series.terms[2] / series.terms[1];
    let expected = (n as f64).powf(beta - 1.0);
    assert!(ratio1 < 10.0 * expected && ratio1 > 0.05 * expected);
    assert!(ratio2 < 10.0 * expected && ratio2 > 0.05 * expected);
}

#[test]
fn born_first_term_error_decays_like_n_to_beta_minus_one() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let beta = 0.5;
    let mut logs: Vec<(f64, f64)> = Vec::new();
    for &n in &[100usize, 1000, 10_000] {
        let series = born_series(&w, n, beta, 3).unwrap();
        let wn = scale_potential(&w, n, beta, 3, PotentialScaling::FullStrength).unwrap();
        let ode = solve_scattering(&wn, 4.0 * wn.support_radius(), 1e-12)
            .unwrap()
            .scattering_length;
        let rel = ((series.partial_sums[0] - ode) / ode).abs();
        logs.push(((n as f64).ln(), rel.ln()));
    }
    let slope = crate::testutil::fit_slope(&logs);
    assert!(
        (slope - (beta - 1.0)).abs() < 0.15,
        "first-Born error slope {slope} vs β-1 = {}",
        beta - 1.0
    );
}

#[test]
fn monotonicity_of_a_in_the_potential() {
    // adding a non-negative bump never decreases the scattering length
    let pairs = [
        (
            RadialPotential::square_well(1.0, 1.0).unwrap(),
            RadialPotential::square_well(2.0, 1.0).unwrap(),
        ),
        (
            RadialPotential::parabolic(2.0, 1.0).unwrap(),
            RadialPotential::parabolic(3.5, 1.0).unwrap(),
        ),
        (
            RadialPotential::bump(1.0, 0.9).unwrap(),
            RadialPotential::bump(2.0, 0.9).unwrap(),
        ),
    ];
    for (small, large) in pairs {
        let a_small = solve_scattering(&small, 5.0, 1e-11).unwrap().scattering_length;
        let a_large = solve_scattering(&large, 5.0, 1e-11).unwrap().scattering_length;
        assert!(a_large >= a_small, "{a_large} < {a_small}");
    }
}

#[test]
fn dyson_constant_test_function() {
    // f ≡ 1: lhs = (1/2)∫w, rhs = 4πa, and lhs > rhs strictly
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 6.0, 1e-12).unwrap();
    let u = DysonPotential::annular(1.0, 3.0, s.scattering_length).unwrap();
    let (lhs, rhs) = dyson_transform(&w, &u, &|_r| (1.0, 0.0), 3.0).unwrap();
    assert_abs_diff_eq!(lhs, 0.5 * w.integral_3d(), epsilon = 1e-6);
    assert_abs_diff_eq!(rhs, 4.0 * PI * s.scattering_length, epsilon = 1e-6);
    assert!(lhs > rhs);
}

#[test]
fn dyson_with_scattering_solution_is_tight() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 20.0, 1e-12).unwrap();
    let a = s.scattering_length;
    for outer in [4.0f64, 8.0, 16.0] {
        let u = DysonPotential::annular(outer - 1.0, outer, a).unwrap();
        let f = |r: f64| (s.f(r), s.f_prime(r));
        let (lhs, rhs) = dyson_transform(&w, &u, &f, outer).unwrap();
        assert!(lhs >= rhs - 1e-8, "Dyson violated at R={outer}: {lhs} < {rhs}");
        // margin shrinks as the annulus moves out
        let margin = (lhs - rhs) / lhs;
        assert!(margin < 0.4, "margin {margin} unexpectedly wide at R={outer}");
    }
}

#[test]
fn dyson_rejects_overlapping_supports() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let u = DysonPotential::annular(0.5, 2.0, 0.2).unwrap();
    assert!(dyson_transform(&w, &u, &|_r| (1.0, 0.0), 3.0).is_err());
}

#[test]
fn dyson_holds_for_a_nodal_test_function() {
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let s = solve_scattering(&w, 8.0, 1e-12).unwrap();
    let u = DysonPotential::annular(1.5, 4.0, s.scattering_length).unwrap();
    // node inside the interaction support at r = 0.5
    let f = |r: f64| (r - 0.5, 1.0);
    let (lhs, rhs) = dyson_transform(&w, &u, &f, 4.0).unwrap();
    assert!(lhs >= rhs - 1e-8);
}

#[test]
fn onsager_single_particle_reduction() {
    let w = OnsagerPotential::Gaussian { amp: 1.3, sigma: 0.6 };
    let rho = DensityMeasure::gaussian_on_grid(1, &[0.2], 0.5, 3.0, 64, 1.0);
    let gap = onsager_gap(&[vec![0.1]], &w, &rho).unwrap();
    // the N = 1 gap is (1/2)∬ρwρ + w(0)/2 - (w*ρ)(x1) >= 0
    assert!(gap >= -1e-9);
    let mut conv = 0.0;
    for (q, &m) in rho.points.iter().zip(rho.weights.iter()) {
        conv += m * w.eval(&[0.1 - q[0]]);
    }
    let mut dq = 0.0;
    for (qa, &ma) in rho.points.iter().zip(rho.weights.iter()) {
        for (qb, &mb) in rho.points.iter().zip(rho.weights.iter()) {
            dq += ma * mb * w.eval(&[qa[0] - qb[0]]);
        }
    }
    let direct = 0.5 * dq + 0.5 * w.at_zero() - conv;
    assert_abs_diff_eq!(gap, direct, epsilon = 1e-10);
}

#[test]
fn onsager_random_configurations_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for dim in 1..=3usize {
        let w = OnsagerPotential::Gaussian { amp: 2.0, sigma: 0.7 };
        let per_axis = match dim {
            1 => 48,
            2 => 16,
            _ => 8,
        };
        let rho =
            DensityMeasure::gaussian_on_grid(dim, &vec![0.0; dim], 0.8, 2.5, per_axis, 4.0);
        for _ in 0..40 {
            let n = rng.random_range(2..7usize);
            let positions: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let gap = onsager_gap(&positions, &w, &rho).unwrap();
            assert!(gap >= -1e-9, "onsager violated: {gap} (d={dim})");
        }
    }
}

#[test]
fn onsager_rejects_uncertified_potentials() {
    let w = OnsagerPotential::Mixture(vec![(1.0, 0.5), (-0.2, 1.0)]);
    let rho = DensityMeasure::gaussian_on_grid(1, &[0.0], 0.5, 2.0, 16, 1.0);
    assert!(onsager_gap(&[vec![0.0], vec![1.0]], &w, &rho).is_err());
}

#[test]
fn csv_ingest_roundtrip() {
    let text = "# r, w\n0.0, 2.0\n0.5, 1.0\n1.0, 0.0\n";
    let w = RadialPotential::from_csv(text).unwrap();
    assert_abs_diff_eq!(w.eval(0.0), 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(w.eval(0.25), 1.5, epsilon = 1e-12);
    assert_eq!(w.eval(1.1), 0.0);
    let report = ScatteringReport::new(&solve_scattering(&w, 4.0, 1e-10).unwrap(), None);
    let json = serde_json::to_string(&report).unwrap();
    let back: ScatteringReport = serde_json::from_str(&json).unwrap();
    assert_abs_diff_eq!(back.a, report.a, epsilon = 0.0);
}

#[test]
fn stiff_profile_reports_resolution_failure_not_garbage() {
    // gigantic amplitude over a tiny range at a loose tolerance still works
    // or errors out; it must never return silently wrong output
    let w = RadialPotential::square_well(1e8, 1e-4).unwrap();
    match solve_scattering(&w, 1e-3, 1e-10) {
        Ok(s) => {
            // hard-wall limit: a -> R0 from below
            assert!(s.scattering_length > 0.0 && s.scattering_length < 1e-4);
        }
        Err(e) => {
            let msg = format!("{e}");
            assert!(msg.contains("resolution") || msg.contains("stiff"));
        }
    }
}
