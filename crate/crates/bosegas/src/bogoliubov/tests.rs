use super::*;
use crate::definetti::{quantize, QuantizationOrder, SymbolPolynomial};
use approx::assert_abs_diff_eq;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[test]
fn one_mode_closed_form() {
    // H = 2, K = 1: E = sqrt(3), E^Bog = (sqrt(3) - 2)/2
    let qh = QuadraticHamiltonian::one_mode(2.0, 1.0).unwrap();
    let out = bogoliubov_ground_energy(&qh);
    assert_abs_diff_eq!(out.e_matrix[(0, 0)], 3f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(out.ground_energy, (3f64.sqrt() - 2.0) / 2.0, epsilon = 1e-12);
}

#[test]
fn zero_pairing_means_zero_ground_energy() {
    let mut h = DMatrix::<f64>::zeros(3, 3);
    h[(0, 0)] = 1.0;
    h[(1, 1)] = 2.5;
    h[(2, 2)] = 0.7;
    h[(0, 1)] = 0.3;
    h[(1, 0)] = 0.3;
    let qh = QuadraticHamiltonian::new(h.clone(), DMatrix::zeros(3, 3)).unwrap();
    let out = bogoliubov_ground_energy(&qh);
    assert!((out.e_matrix.clone() - h).norm() < 1e-10);
    assert_abs_diff_eq!(out.ground_energy, 0.0, epsilon = 1e-12);
    // oracle agrees trivially
    let bf = bogoliubov_brute_force(&qh, 12).unwrap();
    assert_abs_diff_eq!(bf.lowest, 0.0, epsilon = 1e-10);
}

#[test]
fn gap_condition_violation_is_rejected_with_witness() {
    let err = QuadraticHamiltonian::one_mode(1.0, 1.5).unwrap_err();
    let msg = format!("{err}");
    assert!(msg.contains("gap condition"), "unexpected message: {msg}");
}

#[test]
fn one_mode_brute_force_converges_to_the_closed_form() {
    let qh = QuadraticHamiltonian::one_mode(2.0, 1.0).unwrap();
    let bf = bogoliubov_brute_force(&qh, 40).unwrap();
    let exact = (3f64.sqrt() - 2.0) / 2.0;
    assert!(
        (bf.lowest - exact).abs() < 1e-5,
        "cap-40 value {} vs exact {exact}",
        bf.lowest
    );
    assert!((bf.extrapolated - exact).abs() < 1e-6);
    // monotone decrease in the cap
    for w in bf.by_cap.windows(2) {
        assert!(w[1].1 <= w[0].1 + 1e-12);
    }
}

fn random_valid_instance(d: usize, seed: u64) -> QuadraticHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // H = positive definite with spectrum in [1, 3]
    let mut base = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = rng.random::<f64>() - 0.5;
            base[(i, j)] = v;
            base[(j, i)] = v;
        }
    }
    let (eigs, vecs) = eigh_real(&base);
    let mut diag = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        let t = (eigs[i] - eigs[0]) / (eigs[d - 1] - eigs[0]).max(1e-12);
        diag[(i, i)] = 1.0 + 2.0 * t;
    }
    let h = &vecs * diag * vecs.transpose();
    // K small relative to the gap so the truncated oracle converges fast
    let mut k = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = 0.25 * (rng.random::<f64>() - 0.5);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    QuadraticHamiltonian::new(h, k).unwrap()
}

#[test]
fn random_instances_match_the_truncated_fock_oracle() {
    for seed in 0..8u64 {
        let d = 1 + (seed as usize % 3);
        let qh = random_valid_instance(d, seed);
        let closed = bogoliubov_ground_energy(&qh).ground_energy;
        let cap = if d == 3 { 24 } else { 32 };
        let bf = bogoliubov_brute_force(&qh, cap).unwrap();
        assert!(
            (closed - bf.extrapolated).abs() <= 1e-6 * (1.0 + closed.abs()),
            "d={d} seed={seed}: closed {closed} vs oracle {}",
            bf.extrapolated
        );
        let bound = bogoliubov_lower_bound(&qh).unwrap();
        assert!(bound <= closed + 1e-12, "lower bound {bound} above {closed}");
    }
}

#[test]
fn lower_bound_examples() {
    let qh = QuadraticHamiltonian::one_mode(2.0, 1.0).unwrap();
    let bound = bogoliubov_lower_bound(&qh).unwrap();
    assert_abs_diff_eq!(bound, -0.25, epsilon = 1e-14);
    assert!(bound <= (3f64.sqrt() - 2.0) / 2.0);
    // K = 0: bound = 0 = E^Bog
    let free = QuadraticHamiltonian::one_mode(2.0, 0.0).unwrap();
    assert_abs_diff_eq!(bogoliubov_lower_bound(&free).unwrap(), 0.0, epsilon = 1e-15);
    // H >> K: E^Bog ≈ -K²/(4H), the -1/2 bound overshoots by a factor -> 2
    let qh = QuadraticHamiltonian::one_mode(10.0, 1.0).unwrap();
    let e = bogoliubov_ground_energy(&qh).ground_energy;
    let bound = bogoliubov_lower_bound(&qh).unwrap();
    assert_abs_diff_eq!(bound, -0.05, epsilon = 1e-14);
    assert!((bound / e - 2.0).abs() < 0.02, "ratio {}", bound / e);
}

#[test]
fn perturbative_regime_matches_minus_quarter_trace() {
    // ||K|| <= 0.1 λ_min(H): E^Bog ≈ -(1/4) Tr(H^{-1} K²) within 20%
    for seed in 100..106u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 2 + (seed as usize % 2);
        let mut h = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            h[(i, i)] = 1.0 + rng.random::<f64>();
        }
        let mut k = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let v = 0.03 * (rng.random::<f64>() - 0.5);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        let qh = QuadraticHamiltonian::new(h.clone(), k.clone()).unwrap();
        let e = bogoliubov_ground_energy(&qh).ground_energy;
        let quarter = 0.25 * (h.try_inverse().unwrap() * &k * &k).trace();
        assert!(
            (e + quarter).abs() <= 0.2 * quarter.abs(),
            "perturbative mismatch: E = {e}, -(1/4)Tr = {}",
            -quarter
        );
    }
}

#[test]
fn quasifree_verdict_examples() {
    // squeezed family: pure, for any squeezing phase
    for (theta, phase) in [(0.3, 0.0), (1.2, 0.8), (0.7, -2.0)] {
        let state = QuasiFreeState::squeezed_one_mode(theta, phase);
        assert!(matches!(quasifree_validate(&state), QuasiFreeVerdict::ValidPure));
    }
    // γ = 0 with α != 0: not a state
    let bad = QuasiFreeState::new(
        DMatrix::zeros(1, 1),
        DMatrix::from_element(1, 1, Complex64::new(0.4, 0.0)),
    )
    .unwrap();
    assert!(matches!(quasifree_validate(&bad), QuasiFreeVerdict::Invalid { .. }));
    // thermal diagonal: mixed
    let thermal = QuasiFreeState::thermal_diagonal(&[0.3, 1.1]);
    assert!(matches!(quasifree_validate(&thermal), QuasiFreeVerdict::ValidMixed));
}

#[test]
fn wick_rule_examples() {
    let thermal = QuasiFreeState::thermal_diagonal(&[0.7, 0.2]);
    // odd monomials vanish
    let odd = LadderMonomial::normal(vec![0], vec![0, 1]);
    assert_eq!(
        wick_expectation(&thermal, &odd).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    // <a†_i a†_j a_k a_l> with α = 0: γ_ki γ_lj + γ_li γ_kj
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 3;
    let mut g = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = if i == j {
                Complex64::new(rng.random::<f64>(), 0.0)
            } else {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            };
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    let state = QuasiFreeState::new(g.clone(), DMatrix::zeros(d, d)).unwrap();
    for (i, j, k, l) in [(0, 1, 2, 0), (1, 1, 2, 2), (0, 2, 1, 2)] {
        let m = LadderMonomial::normal(vec![i, j], vec![k, l]);
        let got = wick_expectation(&state, &m).unwrap();
        let expect = g[(k, i)] * g[(l, j)] + g[(l, i)] * g[(k, j)];
        assert!((got - expect).norm() < 1e-13, "({i},{j},{k},{l})");
    }
    // single-mode quartic: 2n²
    let one = QuasiFreeState::thermal_diagonal(&[0.9]);
    let m = LadderMonomial::normal(vec![0, 0], vec![0, 0]);
    assert_abs_diff_eq!(
        wick_expectation(&one, &m).unwrap().re,
        2.0 * 0.81,
        epsilon = 1e-13
    );
}

/// Thermal state of a quadratic Hamiltonian on the truncated Fock space:
/// the independent oracle for the Wick rule.
fn thermal_oracle(
    qh: &QuadraticHamiltonian,
    beta: f64,
    cap: usize,
) -> (DMatrix<Complex64>, QuasiFreeState) {
    let dense = dense_quadratic(qh, cap);
    let (values, vectors) = crate::linalg::eigh(&dense);
    let dim = dense.nrows();
    let mut weights = DMatrix::<Complex64>::zeros(dim, dim);
    let mut z = 0.0f64;
    for i in 0..dim {
        let w = (-beta * values[i]).exp();
        weights[(i, i)] = Complex64::new(w, 0.0);
        z += w;
    }
    let gamma_full = &vectors * weights * vectors.adjoint() / Complex64::new(z, 0.0);
    // one-body and pairing matrices read off the thermal state
    let d = qh.dim();
    let basis = TruncatedFockBasis::new(d, cap).unwrap();
    let mut gamma = DMatrix::<Complex64>::zeros(d, d);
    let mut alpha = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let num = SymbolPolynomial::from_monomial(
                d,
                &LadderMonomial::normal(vec![j], vec![i]),
                Complex64::new(1.0, 0.0),
            )
            .unwrap();
            let op = quantize(&num, &basis, QuantizationOrder::Wick);
            gamma[(i, j)] = (&op * &gamma_full).trace();
            let pair = SymbolPolynomial::from_monomial(
                d,
                &LadderMonomial::normal(vec![], vec![i, j]),
                Complex64::new(1.0, 0.0),
            )
            .unwrap();
            let op = quantize(&pair, &basis, QuantizationOrder::Wick);
            alpha[(i, j)] = (&op * &gamma_full).trace();
        }
    }
    (gamma_full, QuasiFreeState { gamma, alpha })
}

#[test]
fn wick_rule_matches_thermal_states_of_quadratic_hamiltonians() {
    for seed in 0..4u64 {
        let d = 1 + (seed as usize % 2);
        let qh = random_valid_instance(d, 300 + seed);
        let beta = 2.5;
        let cap = 24;
        let (gamma_full, state) = thermal_oracle(&qh, beta, cap);
        let basis = TruncatedFockBasis::new(d, cap).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..6 {
            let quartic = LadderMonomial::normal(
                vec![rng.random_range(0..d), rng.random_range(0..d)],
                vec![rng.random_range(0..d), rng.random_range(0..d)],
            );
            let poly = SymbolPolynomial::from_monomial(d, &quartic, Complex64::new(1.0, 0.0))
                .unwrap();
            let op = quantize(&poly, &basis, QuantizationOrder::Wick);
            let direct = (&op * &gamma_full).trace();
            let wick = wick_expectation(&state, &quartic).unwrap();
            assert!(
                (direct - wick).norm() < 1e-8,
                "d={d} seed={seed}: trace {direct} vs wick {wick}"
            );
        }
    }
}

#[test]
fn pair_kernel_examples() {
    use crate::meanfield::{Boundary, Grid};
    use crate::scattering::{solve_scattering, RadialPotential};
    let grid = Grid::cube(3, 6, 2.0, Boundary::Periodic).unwrap();
    let u = Field::constant_normalized(&grid);
    // w = 0: kernel vanishes identically
    let free = RadialPotential::square_well(0.0, 1.0).unwrap();
    let sol = solve_scattering(&free, 4.0, 1e-10).unwrap();
    let kernel = pair_kernel(&u, &sol, 8, CorrelationSign::FMinusOne).unwrap();
    assert!(kernel.matrix.norm() < 1e-14);
    // repulsive well: exterior sites follow -a u(x) u(y) / |x-y| exactly
    let w = RadialPotential::square_well(2.0, 1.0).unwrap();
    let sol = solve_scattering(&w, 6.0, 1e-12).unwrap();
    let n = 16usize;
    let kernel = pair_kernel(&u, &sol, n, CorrelationSign::FMinusOne).unwrap();
    let a = sol.scattering_length;
    let mut checked = 0;
    for i in 0..grid.len() {
        for j in 0..i {
            let disp = grid.displacement(j, i);
            let r: f64 = disp.iter().map(|&x| x * x).sum::<f64>().sqrt();
            if r > sol.support_radius() / n as f64 {
                let expect = -a * (u.data[i] * u.data[j]).re / r;
                assert_abs_diff_eq!(kernel.matrix[(i, j)].re, expect, epsilon = 1e-10);
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
    // the two sign conventions are exact negatives
    let flipped = pair_kernel(&u, &sol, n, CorrelationSign::OneMinusF).unwrap();
    assert!((&kernel.matrix + &flipped.matrix).norm() < 1e-14);
    // symmetric
    for i in 0..grid.len() {
        for j in 0..i {
            assert_eq!(kernel.matrix[(i, j)], kernel.matrix[(j, i)]);
        }
    }
    // range much larger than the box: rejected as a scale mismatch
    assert!(pair_kernel(&u, &sol, 1, CorrelationSign::FMinusOne).is_err());
}
