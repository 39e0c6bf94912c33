//! Dense Hermitian linear algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigendecomposition of a complex Hermitian matrix, eigenvalues ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns, in the
/// same order as the eigenvalues.
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigh needs a square matrix");
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigh_real needs a square matrix");
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Symmetric square root of a real symmetric positive semidefinite matrix.
///
/// Eigenvalues below `floor` are clamped to `floor` before the square root,
/// so the result is always well defined for nearly singular inputs.
pub fn sqrt_psd_real(m: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let (values, vectors) = eigh_real(m);
    let n = m.nrows();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = values[i].max(floor).sqrt();
    }
    &vectors * d * vectors.transpose()
}

/// Trace norm `Tr |M|` of a complex Hermitian matrix.
pub fn trace_norm_hermitian(m: &DMatrix<Complex64>) -> f64 {
    let (values, _) = eigh(m);
    values.iter().map(|v| v.abs()).sum()
}

/// Operator norm of a complex Hermitian matrix.
pub fn operator_norm_hermitian(m: &DMatrix<Complex64>) -> f64 {
    let (values, _) = eigh(m);
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Maximum absolute deviation from Hermitian symmetry.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Lowest eigenpair of a complex Hermitian matrix (dense path).
pub fn lowest_eigenpair_dense(m: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let (values, vectors) = eigh(m);
    (values[0], vectors.column(0).into_owned())
}

/// Fix the global phase of a complex vector: the entry of largest modulus is
/// made real and positive. Determinism helper for eigenvector reporting.
pub fn fix_phase(v: &mut DVector<Complex64>) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_norm + 1e-15 {
            best_norm = z.norm();
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / v[best].norm();
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = if i == j {
                    Complex64::new(next(), 0.0)
                } else {
                    Complex64::new(next(), next())
                };
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    #[test]
    fn eigh_reconstructs_matrix() {
        let m = random_hermitian(12, 7);
        let (values, vectors) = eigh(&m);
        let mut d = DMatrix::<Complex64>::zeros(12, 12);
        for i in 0..12 {
            d[(i, i)] = Complex64::new(values[i], 0.0);
        }
        let rebuilt = &vectors * d * vectors.adjoint();
        assert!((&rebuilt - &m).norm() < 1e-10);
        for i in 1..12 {
            assert!(values[i] >= values[i - 1]);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let a = random_hermitian(8, 3).map(|z| z.re);
        let m = &a * a.transpose(); // psd
        let s = sqrt_psd_real(&m, 0.0);
        assert!((&s * &s - &m).norm() < 1e-9);
    }

    #[test]
    fn trace_norm_of_projector_is_one() {
        let mut v = DVector::<Complex64>::zeros(5);
        v[0] = Complex64::new(0.6, 0.0);
        v[1] = Complex64::new(0.0, 0.8);
        let p = &v * v.adjoint();
        assert!((trace_norm_hermitian(&p) - 1.0).abs() < 1e-12);
    }
}
