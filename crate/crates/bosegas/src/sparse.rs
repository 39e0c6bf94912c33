//! Compressed sparse row storage for Hermitian operators.
//!
//! The matrix-vector product is the only primitive the Krylov eigensolver
//! needs, so nothing else is provided. Rows are independent in the product,
//! which makes it parallel with no shared mutable state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

/// Hermitian sparse matrix in CSR form. Both triangles are stored so the
/// product is a plain row sweep.
#[derive(Debug, Clone)]
pub struct SparseHermitian {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<Complex64>,
}

impl SparseHermitian {
    /// Build from coordinate triplets of the lower triangle (row >= col).
    ///
    /// Upper-triangle entries are mirrored as conjugates, so the result is
    /// Hermitian exactly, by construction. Diagonal entries have their
    /// imaginary part dropped.
    pub fn from_lower_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let mut full: Vec<(u32, u32, Complex64)> = Vec::new();
        for (r, c, v) in triplets {
            debug_assert!(r >= c, "lower triangle expects row >= col");
            debug_assert!(r < dim && c < dim);
            if r == c {
                full.push((r as u32, c as u32, Complex64::new(v.re, 0.0)));
            } else {
                full.push((r as u32, c as u32, v));
                full.push((c as u32, r as u32, v.conj()));
            }
        }
        full.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx: Vec<u32> = Vec::with_capacity(full.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(full.len());
        let mut k = 0usize;
        for r in 0..dim as u32 {
            row_ptr[r as usize] = col_idx.len();
            while k < full.len() && full[k].0 == r {
                let (_, c, v) = full[k];
                // merge duplicates
                if let Some(&last) = col_idx.last() {
                    if last == c && row_ptr[r as usize] < col_idx.len() {
                        *values.last_mut().unwrap() += v;
                        k += 1;
                        continue;
                    }
                }
                col_idx.push(c);
                values.push(v);
                k += 1;
            }
        }
        row_ptr[dim] = col_idx.len();
        SparseHermitian { dim, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A x`, rows in parallel.
    pub fn matvec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        assert_eq!(x.len(), self.dim);
        let xs = x.as_slice();
        let out: Vec<Complex64> = (0..self.dim)
            .into_par_iter()
            .map(|r| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.values[k] * xs[self.col_idx[k] as usize];
                }
                acc
            })
            .collect();
        DVector::from_vec(out)
    }

    /// Dense copy, for the oracle path on small instances.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k] as usize)] = self.values[k];
            }
        }
        m
    }

    /// Diagonal entries (real by construction).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0f64; self.dim];
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[k] as usize == r {
                    d[r] = self.values[k].re;
                }
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;

    #[test]
    fn mirror_is_exactly_hermitian() {
        let t = vec![
            (0usize, 0usize, Complex64::new(1.0, 1e-20)),
            (1, 0, Complex64::new(0.5, -0.25)),
            (2, 1, Complex64::new(-0.125, 2.0)),
            (2, 2, Complex64::new(-3.0, 0.0)),
        ];
        let a = SparseHermitian::from_lower_triplets(3, t);
        let d = a.to_dense();
        assert_eq!(hermiticity_defect(&d), 0.0);
    }

    #[test]
    fn matvec_matches_dense() {
        let t = vec![
            (0usize, 0usize, Complex64::new(2.0, 0.0)),
            (1, 0, Complex64::new(0.5, -0.25)),
            (1, 1, Complex64::new(-1.0, 0.0)),
            (2, 0, Complex64::new(0.0, 0.75)),
        ];
        let a = SparseHermitian::from_lower_triplets(3, t);
        let x = DVector::from_vec(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.25, -0.25),
        ]);
        let y = a.matvec(&x);
        let yd = a.to_dense() * &x;
        assert!((y - yd).norm() < 1e-14);
    }

    #[test]
    fn duplicate_triplets_accumulate() {
        let t = vec![
            (1usize, 0usize, Complex64::new(0.25, 0.0)),
            (1, 0, Complex64::new(0.25, 0.0)),
        ];
        let a = SparseHermitian::from_lower_triplets(2, t);
        let d = a.to_dense();
        assert!((d[(1, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(a.nnz(), 2);
    }
}
