//! Lanczos eigensolver for complex Hermitian operators.
//!
//! Finds the lowest eigenpair from matrix-vector products only, with full
//! reorthogonalization against the stored Krylov vectors and restarts from
//! the current Ritz vector. The starting vector is generated from a fixed
//! seed so runs are reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Relative residual target: converged when ||Av - t v|| <= tol * scale.
    pub tol: f64,
    /// Krylov dimension per restart cycle.
    pub krylov_dim: usize,
    /// Maximum restart cycles.
    pub max_restarts: usize,
    /// Seed for the starting vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-12, krylov_dim: 160, max_restarts: 60, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub eigenvalue: f64,
    pub eigenvector: DVector<Complex64>,
    /// Absolute residual ||Av - t v||.
    pub residual: f64,
    /// Total matrix-vector products performed.
    pub iterations: usize,
    pub converged: bool,
}

/// Deterministic pseudo-random unit vector (shared by solvers that need a
/// reproducible starting point).
pub fn seeded_unit_vector(dim: usize, seed: u64) -> DVector<Complex64> {
    seeded_vector(dim, seed)
}

fn seeded_vector(dim: usize, seed: u64) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::<Complex64>::zeros(dim);
    for z in v.iter_mut() {
        *z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Lowest eigenpair of the Hermitian operator given by `matvec`.
pub fn lowest_eigenpair<F>(matvec: F, dim: usize, opts: &LanczosOptions) -> LanczosOutcome
where
    F: Fn(&DVector<Complex64>) -> DVector<Complex64>,
{
    assert!(dim >= 1);
    if dim == 1 {
        let mut e = DVector::<Complex64>::zeros(1);
        e[0] = Complex64::new(1.0, 0.0);
        let ae = matvec(&e);
        return LanczosOutcome {
            eigenvalue: ae[0].re,
            eigenvector: e,
            residual: 0.0,
            iterations: 1,
            converged: true,
        };
    }

    let m = opts.krylov_dim.min(dim);
    let mut start = seeded_vector(dim, opts.seed);
    let mut total_mv = 0usize;
    let mut best: Option<(f64, DVector<Complex64>, f64)> = None;
    let mut scale_est = 1.0f64;

    for _restart in 0..opts.max_restarts {
        let mut qs: Vec<DVector<Complex64>> = Vec::with_capacity(m + 1);
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        qs.push(start.clone());

        for j in 0..m {
            let mut w = matvec(&qs[j]);
            total_mv += 1;
            let a = qs[j].dotc(&w).re;
            alpha.push(a);
            w -= &qs[j] * Complex64::new(a, 0.0);
            if j > 0 {
                w -= &qs[j - 1] * Complex64::new(beta[j - 1], 0.0);
            }
            // full reorthogonalization keeps the basis clean after many steps
            for q in qs.iter() {
                let overlap = q.dotc(&w);
                w -= q * overlap;
            }
            let b = w.norm();
            scale_est = scale_est.max(a.abs() + b);
            if b < 1e-14 * scale_est.max(1.0) {
                break;
            }
            beta.push(b);
            qs.push(w / Complex64::new(b, 0.0));
        }

        // Ritz pair from the tridiagonal matrix
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i > 0 {
                t[(i, i - 1)] = beta[i - 1];
                t[(i - 1, i)] = beta[i - 1];
            }
        }
        let (tvals, tvecs) = crate::linalg::eigh_real(&t);
        let theta = tvals[0];
        let mut ritz = DVector::<Complex64>::zeros(dim);
        for j in 0..k {
            ritz += &qs[j] * Complex64::new(tvecs[(j, 0)], 0.0);
        }
        let n = ritz.norm();
        ritz /= Complex64::new(n, 0.0);
        let aritz = matvec(&ritz);
        total_mv += 1;
        let res = (&aritz - &ritz * Complex64::new(theta, 0.0)).norm();

        let better = match &best {
            Some((_, _, r)) => res < *r,
            None => true,
        };
        if better {
            best = Some((theta, ritz.clone(), res));
        }
        if res <= opts.tol * scale_est.max(1.0) {
            break;
        }
        start = ritz;
    }

    let (eigenvalue, mut eigenvector, residual) = best.expect("at least one cycle ran");
    crate::linalg::fix_phase(&mut eigenvector);
    let converged = residual <= opts.tol * scale_est.max(1.0);
    LanczosOutcome { eigenvalue, eigenvector, residual, iterations: total_mv, converged }
}

/// Lowest eigenpair orthogonal to `deflate`: used to probe degeneracy of the
/// ground level without claiming a canonical eigenbasis.
///
/// The deflated direction is shifted above a power-iteration estimate of the
/// spectral radius so it cannot masquerade as the second level.
pub fn lowest_eigenpair_deflated<F>(
    matvec: F,
    dim: usize,
    deflate: &DVector<Complex64>,
    opts: &LanczosOptions,
) -> LanczosOutcome
where
    F: Fn(&DVector<Complex64>) -> DVector<Complex64>,
{
    let mut probe = seeded_vector(dim, opts.seed.wrapping_add(77));
    let mut radius = 1.0f64;
    for _ in 0..12 {
        let next = matvec(&probe);
        radius = next.norm().max(1e-30);
        probe = next / Complex64::new(radius, 0.0);
    }
    let shift = 2.0 * radius + 1.0;
    let project = |v: &DVector<Complex64>| -> DVector<Complex64> {
        let overlap = deflate.dotc(v);
        v - deflate * overlap
    };
    let wrapped = |v: &DVector<Complex64>| -> DVector<Complex64> {
        let pv = project(v);
        let overlap = deflate.dotc(v);
        project(&matvec(&pv)) + deflate * (overlap * shift)
    };
    let mut opts2 = opts.clone();
    opts2.seed = opts.seed.wrapping_add(1);
    let mut out = lowest_eigenpair(wrapped, dim, &opts2);
    out.eigenvector = project(&out.eigenvector);
    let n = out.eigenvector.norm();
    if n > 1e-12 {
        out.eigenvector /= Complex64::new(n, 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lowest_eigenpair_dense;
    use crate::sparse::SparseHermitian;
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(dim: usize, seed: u64) -> SparseHermitian {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut triplets = Vec::new();
        for r in 0..dim {
            triplets.push((r, r, Complex64::new(rng.random::<f64>() * 4.0 - 2.0, 0.0)));
            for _ in 0..3 {
                let c = rng.random_range(0..dim);
                if c < r {
                    triplets.push((
                        r,
                        c,
                        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                    ));
                }
            }
        }
        SparseHermitian::from_lower_triplets(dim, triplets)
    }

    #[test]
    fn matches_dense_on_random_500() {
        let a = random_sparse(500, 11);
        let out = lowest_eigenpair(|v| a.matvec(v), 500, &LanczosOptions::default());
        let (dense_val, _) = lowest_eigenpair_dense(&a.to_dense());
        assert!(out.converged);
        assert!(
            (out.eigenvalue - dense_val).abs() < 1e-10,
            "lanczos {} vs dense {}",
            out.eigenvalue,
            dense_val
        );
    }

    #[test]
    fn residual_is_small_and_reported() {
        let a = random_sparse(200, 3);
        let out = lowest_eigenpair(|v| a.matvec(v), 200, &LanczosOptions::default());
        let r = (&a.matvec(&out.eigenvector) - &out.eigenvector * Complex64::new(out.eigenvalue, 0.0)).norm();
        assert!((r - out.residual).abs() < 1e-9);
        assert!(r < 1e-9);
    }

    #[test]
    fn deflation_finds_second_level() {
        // diagonal with a known spectrum
        let triplets: Vec<(usize, usize, Complex64)> = (0..6)
            .map(|i| (i, i, Complex64::new(i as f64, 0.0)))
            .collect();
        let a = SparseHermitian::from_lower_triplets(6, triplets);
        let first = lowest_eigenpair(|v| a.matvec(v), 6, &LanczosOptions::default());
        assert!((first.eigenvalue - 0.0).abs() < 1e-10);
        let second =
            lowest_eigenpair_deflated(|v| a.matvec(v), 6, &first.eigenvector, &LanczosOptions::default());
        assert!((second.eigenvalue - 1.0).abs() < 1e-8);
    }
}
