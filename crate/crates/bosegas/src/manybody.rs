//! Scaled many-body Hamiltonians in mode space.
//!
//! Assembles `H = sum h_jk a†_j a_k + (c_N/2) sum w_ijkl a†_i a†_j a_k a_l`
//! over an occupation basis, computes ground states (Lanczos with a dense
//! oracle), reduced density matrices, condensate fractions, second moments,
//! two-body energy localization and excitation-map decompositions.

use crate::error::Error;
use crate::fock::{ln_factorial_table, rotate_modes, LadderMonomial, OccupationBasis};
use crate::lanczos::{
    lowest_eigenpair, lowest_eigenpair_deflated, seeded_unit_vector, LanczosOptions,
};
use crate::linalg::{eigh, fix_phase, hermiticity_defect};
use crate::sparse::SparseHermitian;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const HERMITICITY_TOL: f64 = 1e-12;

/// One-body Hamiltonian matrix `h` on the mode space (complex Hermitian).
#[derive(Debug, Clone)]
pub struct OneBodyMatrix {
    entries: DMatrix<Complex64>,
}

impl OneBodyMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::dim("one-body matrix must be square"));
        }
        let defect = hermiticity_defect(&entries);
        if defect > HERMITICITY_TOL {
            return Err(Error::invalid(format!(
                "one-body matrix not Hermitian (defect {defect:.2e})"
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("one-body matrix has non-finite entries"));
        }
        Ok(OneBodyMatrix { entries })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        OneBodyMatrix { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }
}

/// Symmetric two-body tensor `w_ijkl`, stored sparsely.
///
/// Invariants: `w_ijkl = conj(w_klij)` (hermiticity) and `w_ijkl = w_jilk`
/// (bosonic exchange symmetry).
#[derive(Debug, Clone, Default)]
pub struct TwoBodyTensor {
    dim: usize,
    terms: BTreeMap<(u16, u16, u16, u16), Complex64>,
}

impl TwoBodyTensor {
    pub fn zero(dim: usize) -> Self {
        TwoBodyTensor { dim, terms: BTreeMap::new() }
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = ((usize, usize, usize, usize), Complex64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((i, j, k, l), v) in terms {
            if i >= dim || j >= dim || k >= dim || l >= dim {
                return Err(Error::dim(format!("tensor index ({i},{j},{k},{l}) vs D={dim}")));
            }
            *map.entry((i as u16, j as u16, k as u16, l as u16))
                .or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let t = TwoBodyTensor { dim, terms: map };
        t.validate()?;
        Ok(t)
    }

    /// Build from the matrix elements of a pair potential on the product
    /// basis: `w_ijkl = <ij| W |kl>` given as a `D^2 x D^2` matrix.
    pub fn from_pair_matrix(dim: usize, w: &DMatrix<Complex64>) -> Result<Self> {
        if w.nrows() != dim * dim || w.ncols() != dim * dim {
            return Err(Error::dim("pair matrix must be D^2 x D^2"));
        }
        let mut terms = BTreeMap::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let v = w[(i * dim + j, k * dim + l)];
                        if v.norm() > 0.0 {
                            terms.insert((i as u16, j as u16, k as u16, l as u16), v);
                        }
                    }
                }
            }
        }
        let t = TwoBodyTensor { dim, terms };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (&(i, j, k, l), &v) in &self.terms {
            let herm = self.get(k as usize, l as usize, i as usize, j as usize);
            if (v - herm.conj()).norm() > HERMITICITY_TOL {
                return Err(Error::invalid(format!(
                    "tensor not Hermitian at ({i},{j},{k},{l})"
                )));
            }
            let bose = self.get(j as usize, i as usize, l as usize, k as usize);
            if (v - bose).norm() > HERMITICITY_TOL {
                return Err(Error::invalid(format!(
                    "tensor not bosonic-symmetric at ({i},{j},{k},{l})"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.terms
            .get(&(i as u16, j as u16, k as u16, l as u16))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), Complex64)> + '_ {
        self.terms
            .iter()
            .map(|(&(i, j, k, l), &v)| ((i as usize, j as usize, k as usize, l as usize), v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.norm() == 0.0)
    }

    /// `<u ⊗ u| W |u ⊗ u>`.
    pub fn pair_expectation(&self, u: &DVector<Complex64>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((i, j, k, l), v) in self.terms() {
            acc += v * (u[i] * u[j]).conj() * u[k] * u[l];
        }
        acc
    }

    /// The pair potential as a `D^2 x D^2` matrix on the product space.
    pub fn to_pair_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim;
        let mut m = DMatrix::<Complex64>::zeros(d * d, d * d);
        for ((i, j, k, l), v) in self.terms() {
            m[(i * d + j, k * d + l)] = v;
        }
        m
    }
}

/// Coupling convention for the pair interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingConvention {
    /// `c_N = 1/(N-1)`: the energy per particle targets the mean-field
    /// functional directly.
    PerPair,
    /// `c_N = 1`.
    Unscaled,
}

/// Scaling bookkeeping for the interaction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub beta: f64,
    pub convention: CouplingConvention,
}

impl ScalingSpec {
    pub fn mean_field() -> Self {
        ScalingSpec { beta: 0.0, convention: CouplingConvention::PerPair }
    }

    pub fn unscaled() -> Self {
        ScalingSpec { beta: 0.0, convention: CouplingConvention::Unscaled }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(Error::invalid("scaling exponent beta must be >= 0"));
        }
        Ok(())
    }

    pub fn coupling(&self, particles: usize) -> f64 {
        match self.convention {
            CouplingConvention::PerPair => {
                if particles > 1 {
                    1.0 / (particles as f64 - 1.0)
                } else {
                    0.0
                }
            }
            CouplingConvention::Unscaled => 1.0,
        }
    }
}

/// Assembled sparse many-body Hamiltonian over an occupation basis.
#[derive(Debug, Clone)]
pub struct ManyBodyHamiltonian {
    basis: OccupationBasis,
    matrix: SparseHermitian,
    scaling: ScalingSpec,
    /// Set when N = 1 under the per-pair convention: the interaction was
    /// dropped because there is no pair to carry it.
    pub interaction_zeroed: bool,
}

impl ManyBodyHamiltonian {
    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseHermitian {
        &self.matrix
    }

    pub fn scaling(&self) -> ScalingSpec {
        self.scaling
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matvec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        self.matrix.matvec(x)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        self.matrix.to_dense()
    }
}

/// All matrix elements `<m|H|n>` for a fixed source occupation (column).
fn column_entries(
    basis: &OccupationBasis,
    col: usize,
    h: &DMatrix<Complex64>,
    w: &TwoBodyTensor,
    coupling_half: f64,
) -> Vec<(usize, usize, Complex64)> {
    let d = basis.modes();
    let occ = basis.state(col);
    let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
    let mut scratch = vec![0u32; d];

    // one-body: a†_j a_k
    for k in 0..d {
        if occ[k] == 0 {
            continue;
        }
        for j in 0..d {
            let hjk = h[(j, k)];
            if hjk.norm() == 0.0 {
                continue;
            }
            scratch.copy_from_slice(occ);
            let mut amp = (scratch[k] as f64).sqrt();
            scratch[k] -= 1;
            scratch[j] += 1;
            amp *= (scratch[j] as f64).sqrt();
            let row = basis.index_of(&scratch);
            *acc.entry(row).or_insert(Complex64::new(0.0, 0.0)) += hjk * amp;
        }
    }

    // two-body: (c_N/2) w_ijkl a†_i a†_j a_k a_l
    if coupling_half != 0.0 {
        for ((i, j, k, l), v) in w.terms() {
            if occ[l] == 0 {
                continue;
            }
            scratch.copy_from_slice(occ);
            let mut amp = (scratch[l] as f64).sqrt();
            scratch[l] -= 1;
            if scratch[k] == 0 {
                continue;
            }
            amp *= (scratch[k] as f64).sqrt();
            scratch[k] -= 1;
            scratch[j] += 1;
            amp *= (scratch[j] as f64).sqrt();
            scratch[i] += 1;
            amp *= (scratch[i] as f64).sqrt();
            let row = basis.index_of(&scratch);
            *acc.entry(row).or_insert(Complex64::new(0.0, 0.0)) += v * (amp * coupling_half);
        }
    }

    acc.into_iter().map(|(row, v)| (row, col, v)).collect()
}

/// Assemble the second-quantized Hamiltonian on `OccupationBasis(N, D)`.
///
/// The matrix equals `sum h_jk a†_j a_k + (c_N/2) sum w_ijkl a†_i a†_j a_k a_l`
/// with `c_N` from the scaling convention, Hermitian exactly by construction
/// (only the lower triangle is computed, the rest mirrored).
pub fn assemble_hamiltonian(
    h: &OneBodyMatrix,
    w: &TwoBodyTensor,
    particles: usize,
    scaling: ScalingSpec,
) -> Result<ManyBodyHamiltonian> {
    scaling.validate()?;
    if particles == 0 {
        return Err(Error::invalid("need at least one particle"));
    }
    if h.dim() != w.dim() {
        return Err(Error::dim(format!(
            "one-body D={} vs two-body D={}",
            h.dim(),
            w.dim()
        )));
    }
    let basis = OccupationBasis::new(particles, h.dim())?;
    let coupling = scaling.coupling(particles);
    let interaction_zeroed =
        particles == 1 && scaling.convention == CouplingConvention::PerPair && !w.is_zero();
    let coupling_half = 0.5 * coupling;
    let columns: Vec<Vec<(usize, usize, Complex64)>> = (0..basis.len())
        .into_par_iter()
        .map(|col| {
            column_entries(&basis, col, h.entries(), w, coupling_half)
                .into_iter()
                .filter(|&(row, c, _)| row >= c)
                .collect()
        })
        .collect();
    let matrix = SparseHermitian::from_lower_triplets(basis.len(), columns.into_iter().flatten());
    Ok(ManyBodyHamiltonian { basis, matrix, scaling, interaction_zeroed })
}

/// Ground-state output.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    /// Normalized coefficient vector over the occupation basis, global phase
    /// fixed (largest-modulus entry real positive).
    pub vector: DVector<Complex64>,
    pub solver_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// A second Krylov pass with deflation found another level within the
    /// degeneracy window.
    pub degenerate: bool,
}

/// Lowest eigenpair via Lanczos, with a deflated second pass to flag
/// degeneracy. [`dense_ground_state`] is the independent oracle for
/// dimensions small enough to diagonalize densely.
pub fn ground_state(h: &ManyBodyHamiltonian, tol: f64) -> Result<GroundStateResult> {
    let opts = LanczosOptions { tol, ..LanczosOptions::default() };
    let out = lowest_eigenpair(|v| h.matvec(v), h.dim(), &opts);
    if !out.converged {
        return Err(Error::NoConvergence(format!(
            "lanczos residual {:.3e} after {} matvecs (partial energy {:.12})",
            out.residual, out.iterations, out.eigenvalue
        )));
    }
    let mut degenerate = false;
    if h.dim() > 1 {
        let second = lowest_eigenpair_deflated(|v| h.matvec(v), h.dim(), &out.eigenvector, &opts);
        let scale = 1.0 + out.eigenvalue.abs();
        degenerate = (second.eigenvalue - out.eigenvalue).abs() <= 1e-8 * scale;
    }
    Ok(GroundStateResult {
        energy: out.eigenvalue,
        vector: out.eigenvector,
        solver_residual: out.residual,
        iterations: out.iterations,
        converged: out.converged,
        degenerate,
    })
}

/// Dense diagonalization oracle for the ground state.
pub fn dense_ground_state(h: &ManyBodyHamiltonian) -> GroundStateResult {
    let (values, vectors) = eigh(&h.to_dense());
    let mut v = vectors.column(0).into_owned();
    fix_phase(&mut v);
    let degenerate =
        values.len() > 1 && (values[1] - values[0]).abs() <= 1e-8 * (1.0 + values[0].abs());
    GroundStateResult {
        energy: values[0],
        vector: v,
        solver_residual: 0.0,
        iterations: 0,
        converged: true,
        degenerate,
    }
}

/// Normalization convention for reduced density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdmNormalization {
    /// Trace `C(N, k)`.
    Binomial,
    /// Unit trace.
    UnitTrace,
}

/// Reduced density matrix of order `k` on the `k`-particle symmetric sector.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    pub order: usize,
    pub matrix: DMatrix<Complex64>,
    pub normalization: RdmNormalization,
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> f64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn to_unit_trace(&self, particles: usize) -> ReducedDensityMatrix {
        match self.normalization {
            RdmNormalization::UnitTrace => self.clone(),
            RdmNormalization::Binomial => {
                let norm = binomial_f64(particles, self.order);
                ReducedDensityMatrix {
                    order: self.order,
                    matrix: &self.matrix / Complex64::new(norm, 0.0),
                    normalization: RdmNormalization::UnitTrace,
                }
            }
        }
    }
}

pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `Γ^(k)` of a normalized `N`-particle vector, binomial normalization.
///
/// Entries over the `k`-sector occupation basis:
/// `Γ[m', m] = (m'! m!)^{-1/2} <Ψ| (a†)^m (a)^{m'} |Ψ>`; trace `C(N, k)`.
pub fn reduced_density_matrix(
    basis: &OccupationBasis,
    psi: &DVector<Complex64>,
    k: usize,
) -> Result<ReducedDensityMatrix> {
    let n = basis.particles();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("order k={k} outside 1..=N={n}")));
    }
    let d = basis.modes();
    let sector = OccupationBasis::new(k, d)?;
    let ln_fact = ln_factorial_table(n.max(k));
    // psi_mu = (a)^mu psi for each k-sector occupation mu
    let reduced: Vec<DVector<Complex64>> = (0..sector.len())
        .into_par_iter()
        .map(|s| {
            let mu = sector.state(s);
            let mut ann: Vec<usize> = Vec::with_capacity(k);
            for (mode, &count) in mu.iter().enumerate() {
                for _ in 0..count {
                    ann.push(mode);
                }
            }
            let monomial = LadderMonomial::normal(vec![], ann);
            crate::fock::apply_ladder(&monomial, basis, psi)
                .expect("validated dims")
                .into_vector()
                .expect("k <= N")
                .1
        })
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(sector.len(), sector.len());
    for row in 0..sector.len() {
        for col in 0..sector.len() {
            let mut log_norm = 0.0;
            for &x in sector.state(row) {
                log_norm -= 0.5 * ln_fact[x as usize];
            }
            for &x in sector.state(col) {
                log_norm -= 0.5 * ln_fact[x as usize];
            }
            // <m'|Γ|m> with m' = row, m = col equals <psi_{m'}... paired as
            // <(a)^{col} psi, (a)^{row} psi>
            let inner = reduced[col].dotc(&reduced[row]);
            m[(row, col)] = inner * log_norm.exp();
        }
    }
    Ok(ReducedDensityMatrix { order: k, matrix: m, normalization: RdmNormalization::Binomial })
}

/// Partial trace over one particle of a `(k)`-sector operator (k >= 1), in
/// the occupation representation:
/// `ptr(G)[α', α] = sum_j sqrt((α'_j+1)(α_j+1)) / k * G[α'+e_j, α+e_j]`.
pub fn partial_trace_one(
    matrix: &DMatrix<Complex64>,
    modes: usize,
    order: usize,
) -> Result<DMatrix<Complex64>> {
    if order < 1 {
        return Err(Error::invalid("partial trace needs order >= 1"));
    }
    let upper = OccupationBasis::new(order, modes)?;
    if matrix.nrows() != upper.len() || matrix.ncols() != upper.len() {
        return Err(Error::dim("matrix does not match the k-sector"));
    }
    let lower = OccupationBasis::new(order - 1, modes)?;
    let mut out = DMatrix::<Complex64>::zeros(lower.len(), lower.len());
    let mut up_row = vec![0u32; modes];
    let mut up_col = vec![0u32; modes];
    for r in 0..lower.len() {
        for c in 0..lower.len() {
            let ar = lower.state(r);
            let ac = lower.state(c);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..modes {
                up_row.copy_from_slice(ar);
                up_col.copy_from_slice(ac);
                up_row[j] += 1;
                up_col[j] += 1;
                let weight =
                    ((up_row[j] as f64) * (up_col[j] as f64)).sqrt() / order as f64;
                acc += matrix[(upper.index_of(&up_row), upper.index_of(&up_col))] * weight;
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Largest eigenvalue of `Γ^(1)/N` and its mode; ties broken toward the
/// lowest mode index.
pub fn condensate_fraction(
    rdm1: &ReducedDensityMatrix,
    particles: usize,
) -> Result<(f64, DVector<Complex64>)> {
    if rdm1.order != 1 {
        return Err(Error::invalid("condensate fraction needs a 1-body matrix"));
    }
    let normalized = match rdm1.normalization {
        RdmNormalization::Binomial => &rdm1.matrix / Complex64::new(particles as f64, 0.0),
        RdmNormalization::UnitTrace => rdm1.matrix.clone(),
    };
    let (values, vectors) = eigh(&normalized);
    let top = *values.last().unwrap();
    let mut best_col = values.len() - 1;
    let mut best_lead = usize::MAX;
    for (i, &v) in values.iter().enumerate() {
        if (top - v).abs() <= 1e-12 {
            let col = vectors.column(i);
            let lead = col.iter().position(|z| z.norm() > 1e-8).unwrap_or(usize::MAX);
            if lead < best_lead {
                best_lead = lead;
                best_col = i;
            }
        }
    }
    let mut mode = vectors.column(best_col).into_owned();
    fix_phase(&mut mode);
    Ok((top, mode))
}

/// Hartree energy of the product state `u^{⊗N}`:
/// `<u^N|H_N|u^N>/N = <u|h|u> + ((N-1) c_N / 2) <u⊗u|W|u⊗u>`.
///
/// Under the per-pair convention the prefactor is exactly 1/2 and the value
/// is `N`-independent; it always upper-bounds `E(N)/N`.
pub fn hartree_upper_bound(
    h: &OneBodyMatrix,
    w: &TwoBodyTensor,
    particles: usize,
    scaling: ScalingSpec,
    u: &DVector<Complex64>,
) -> Result<f64> {
    if (u.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("u must be normalized"));
    }
    if u.len() != h.dim() {
        return Err(Error::dim("u vs one-body dimension"));
    }
    let one_body = u.dotc(&(h.entries() * u)).re;
    let pair = w.pair_expectation(u).re;
    let prefactor = (particles.saturating_sub(1)) as f64 * scaling.coupling(particles) / 2.0;
    Ok(one_body + prefactor * pair)
}

/// Finite-mode Hartree minimum `min_{|u|=1} <u|h|u> + (1/2)<u⊗u|W|u⊗u>`,
/// by projected gradient descent with deterministic restarts.
pub fn hartree_minimum(h: &OneBodyMatrix, w: &TwoBodyTensor) -> (f64, DVector<Complex64>) {
    let d = h.dim();
    let grad = |u: &DVector<Complex64>| -> DVector<Complex64> {
        let mut g = h.entries() * u;
        for ((i, j, k, l), v) in w.terms() {
            g[i] += v * u[j].conj() * u[k] * u[l];
        }
        g
    };
    let energy = |u: &DVector<Complex64>| -> f64 {
        u.dotc(&(h.entries() * u)).re + 0.5 * w.pair_expectation(u).re
    };
    let mut best: Option<(f64, DVector<Complex64>)> = None;
    for attempt in 0..4u64 {
        let mut u = seeded_unit_vector(d, 1000 + attempt);
        let mut step = 0.1f64;
        let mut e = energy(&u);
        for _ in 0..5000 {
            let g = grad(&u);
            let mu = u.dotc(&g).re;
            let r = &g - &u * Complex64::new(mu, 0.0);
            if r.norm() < 1e-13 {
                break;
            }
            let mut accepted = false;
            for _ in 0..50 {
                let mut trial = &u - &r * Complex64::new(step, 0.0);
                let n = trial.norm();
                trial /= Complex64::new(n, 0.0);
                let et = energy(&trial);
                if et <= e {
                    u = trial;
                    e = et;
                    step *= 1.2;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        match &best {
            Some((be, _)) if *be <= e => {}
            _ => best = Some((e, u)),
        }
    }
    let (e, mut u) = best.unwrap();
    fix_phase(&mut u);
    (e, u)
}

/// Normalized two-particle energy moment `C(N,2)^{-1} Tr(h_1 ⊗ h_2 Γ^(2))`.
#[derive(Debug, Clone, Copy)]
pub struct SecondMoment {
    /// Moment of the shifted operator `h + shift` (the quantity the
    /// repulsive-case estimate controls; needs `h + shift >= 0`).
    pub shifted: f64,
    /// Spectral shift applied so the one-body operator is psd (0 when `h`
    /// already is).
    pub shift: f64,
    /// Moment of the unshifted `h` (the shift undone), reported alongside.
    pub raw: f64,
}

/// Second moment via `sum_{i<j} h_i h_j = (dΓ(h)^2 - dΓ(h^2)) / 2`.
pub fn second_moment(
    basis: &OccupationBasis,
    psi: &DVector<Complex64>,
    h: &OneBodyMatrix,
) -> Result<SecondMoment> {
    if (psi.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::invalid("psi must be normalized"));
    }
    let n = basis.particles();
    if n < 2 {
        return Err(Error::invalid("second moment needs N >= 2"));
    }
    let (values, _) = eigh(h.entries());
    let shift = (-values[0]).max(0.0);
    let moment_of = |hm: &DMatrix<Complex64>| -> f64 {
        let dg = one_body_lift(basis, hm);
        let h2 = hm * hm;
        let dg2 = one_body_lift(basis, &h2);
        let v = dg.matvec(psi);
        let first = v.dotc(&v).re;
        let second = psi.dotc(&dg2.matvec(psi)).re;
        (first - second) / 2.0 / binomial_f64(n, 2)
    };
    let raw = moment_of(h.entries());
    let shifted = if shift > 0.0 {
        let mut hs = h.entries().clone();
        for i in 0..hs.nrows() {
            hs[(i, i)] += Complex64::new(shift, 0.0);
        }
        moment_of(&hs)
    } else {
        raw
    };
    Ok(SecondMoment { shifted, shift, raw })
}

/// `dΓ(A) = sum A_jk a†_j a_k` as a sparse operator on the sector.
pub fn one_body_lift(basis: &OccupationBasis, a: &DMatrix<Complex64>) -> SparseHermitian {
    let zero = TwoBodyTensor::zero(basis.modes());
    let columns: Vec<Vec<(usize, usize, Complex64)>> = (0..basis.len())
        .into_par_iter()
        .map(|col| {
            column_entries(basis, col, a, &zero, 0.0)
                .into_iter()
                .filter(|&(row, c, _)| row >= c)
                .collect()
        })
        .collect();
    SparseHermitian::from_lower_triplets(basis.len(), columns.into_iter().flatten())
}

/// The two-particle Hamiltonian `H_2 = h ⊗ 1 + 1 ⊗ h + W` on the product
/// space `C^D ⊗ C^D`, pair potential at full strength.
pub fn two_body_matrix(h: &OneBodyMatrix, w: &TwoBodyTensor) -> Result<DMatrix<Complex64>> {
    if h.dim() != w.dim() {
        return Err(Error::dim("one-body vs two-body dimensions"));
    }
    let d = h.dim();
    let mut m = w.to_pair_matrix();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                m[(i * d + j, k * d + j)] += h.entries()[(i, k)];
                m[(j * d + i, j * d + k)] += h.entries()[(i, k)];
            }
        }
    }
    Ok(m)
}

/// Output of the two-body energy localization.
#[derive(Debug, Clone)]
pub struct LocalizedTwoBody {
    /// `P^{⊗2} H_2 P^{⊗2}` on the product space.
    pub projected: DMatrix<Complex64>,
    /// `Q ⊗ 1 + 1 ⊗ Q` (the cutoff factor `Λ/2` is left to the caller).
    pub excited_weight: DMatrix<Complex64>,
    pub p_rank: usize,
    /// Set when the cutoff fell below the whole spectrum of `h` (P = 0).
    pub empty_projector: bool,
}

/// Spectral localization of a two-particle Hamiltonian at energy cutoff `Λ`:
/// `P` projects `h` onto eigenvalues `<= Λ`.
pub fn localize_two_body(
    h2: &DMatrix<Complex64>,
    h: &OneBodyMatrix,
    lambda: f64,
) -> Result<LocalizedTwoBody> {
    let d = h.dim();
    if h2.nrows() != d * d || h2.ncols() != d * d {
        return Err(Error::dim("H2 must be D^2 x D^2"));
    }
    let (values, vectors) = eigh(h.entries());
    let mut p = DMatrix::<Complex64>::zeros(d, d);
    let mut rank = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v <= lambda {
            let col = vectors.column(i);
            p += &col * col.adjoint();
            rank += 1;
        }
    }
    let empty = rank == 0;
    let q = DMatrix::<Complex64>::identity(d, d) - &p;
    let pp = p.kronecker(&p);
    let projected = &pp * h2 * &pp;
    let id = DMatrix::<Complex64>::identity(d, d);
    let excited_weight = q.kronecker(&id) + id.kronecker(&q);
    Ok(LocalizedTwoBody { projected, excited_weight, p_rank: rank, empty_projector: empty })
}

/// Excitation-map decomposition `Ψ = sum_k φ_k ⊗_sym u^{⊗(N-k)}`.
#[derive(Debug, Clone)]
pub struct ExcitationDecomposition {
    /// `φ_k` over `OccupationBasis(k, D-1)` built on the complement modes,
    /// k = 0..=N. For D = 1 every sector beyond k = 0 is empty.
    pub sectors: Vec<DVector<Complex64>>,
    /// Orthonormal basis of the complement of `u` (columns), in the original
    /// mode basis.
    pub complement: DMatrix<Complex64>,
}

impl ExcitationDecomposition {
    /// `sum_k ||φ_k||^2`; equals 1 for a normalized input (unitarity).
    pub fn total_weight(&self) -> f64 {
        self.sectors.iter().map(|v| v.norm_squared()).sum()
    }

    pub fn sector_weight(&self, k: usize) -> f64 {
        self.sectors[k].norm_squared()
    }
}

/// Split a normalized state along the condensate mode `u`.
pub fn excitation_decompose(
    basis: &OccupationBasis,
    psi: &DVector<Complex64>,
    u: &DVector<Complex64>,
) -> Result<ExcitationDecomposition> {
    let d = basis.modes();
    if u.len() != d {
        return Err(Error::dim("u vs mode dimension"));
    }
    if (u.norm() - 1.0).abs() > 1e-10 || (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("u and psi must be normalized"));
    }
    // unitary with first column u, completed by Gram-Schmidt over unit vectors
    let mut unitary = DMatrix::<Complex64>::zeros(d, d);
    unitary.set_column(0, u);
    let mut filled = 1usize;
    for e in 0..d {
        if filled == d {
            break;
        }
        let mut cand = DVector::<Complex64>::zeros(d);
        cand[e] = Complex64::new(1.0, 0.0);
        for c in 0..filled {
            let col = unitary.column(c).into_owned();
            let overlap = col.dotc(&cand);
            cand -= &col * overlap;
        }
        let n = cand.norm();
        if n > 1e-8 {
            cand /= Complex64::new(n, 0.0);
            unitary.set_column(filled, &cand);
            filled += 1;
        }
    }
    if filled != d {
        return Err(Error::invalid("failed to complete the mode basis"));
    }
    let rotated = rotate_modes(basis, psi, &unitary)?;
    let n = basis.particles();
    let mut sectors = Vec::with_capacity(n + 1);
    if d == 1 {
        for k in 0..=n {
            let mut phi = DVector::<Complex64>::zeros(if k == 0 { 1 } else { 0 });
            if k == 0 {
                phi[0] = rotated[0];
            }
            sectors.push(phi);
        }
    } else {
        let mut occ = vec![0u32; d];
        for k in 0..=n {
            let sub = OccupationBasis::new(k, d - 1)?;
            let mut phi = DVector::<Complex64>::zeros(sub.len());
            for (s, tail) in sub.states().enumerate() {
                occ[0] = (n - k) as u32;
                occ[1..].copy_from_slice(tail);
                phi[s] = rotated[basis.index_of(&occ)];
            }
            sectors.push(phi);
        }
    }
    let complement = unitary.columns(1, d - 1).into_owned();
    Ok(ExcitationDecomposition { sectors, complement })
}

/// `<Ψ, sum_j h_j Ψ> - <sqrt(ρ_Ψ), h sqrt(ρ_Ψ)>` on a lattice mode space.
///
/// `h` must be real symmetric with non-positive off-diagonal entries
/// (discrete Laplacian plus potential); the result is >= 0 up to roundoff.
pub fn hoffmann_ostenhof_gap(
    basis: &OccupationBasis,
    psi: &DVector<Complex64>,
    h_lattice: &OneBodyMatrix,
) -> Result<f64> {
    let d = basis.modes();
    if h_lattice.dim() != d {
        return Err(Error::dim("lattice operator vs mode dimension"));
    }
    for i in 0..d {
        for j in 0..d {
            let z = h_lattice.entries()[(i, j)];
            if z.im.abs() > 1e-14 {
                return Err(Error::invalid("lattice operator must be real"));
            }
            if i != j && z.re > 1e-14 {
                return Err(Error::invalid(
                    "lattice operator must have non-positive off-diagonal entries",
                ));
            }
        }
    }
    let rdm1 = reduced_density_matrix(basis, psi, 1)?;
    let mut lhs = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            lhs += (h_lattice.entries()[(i, j)] * rdm1.matrix[(j, i)]).re;
        }
    }
    let mut sqrt_rho = DVector::<f64>::zeros(d);
    for i in 0..d {
        sqrt_rho[i] = rdm1.matrix[(i, i)].re.max(0.0).sqrt();
    }
    let mut rhs = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            rhs += sqrt_rho[i] * h_lattice.entries()[(i, j)].re * sqrt_rho[j];
        }
    }
    Ok(lhs - rhs)
}

// ---------------------------------------------------------------------------
// JSON model interchange

/// On-disk model: one-body matrix (row-major `[re, im]` pairs) plus sparse
/// two-body terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(rename = "D")]
    pub d: usize,
    pub h: Vec<[f64; 2]>,
    #[serde(default)]
    pub w_terms: Vec<WTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl ModelFile {
    pub fn to_operators(&self) -> Result<(OneBodyMatrix, TwoBodyTensor)> {
        if self.h.len() != self.d * self.d {
            return Err(Error::Config(format!(
                "h has {} entries, expected D^2 = {}",
                self.h.len(),
                self.d * self.d
            )));
        }
        let mut m = DMatrix::<Complex64>::zeros(self.d, self.d);
        for r in 0..self.d {
            for c in 0..self.d {
                let [re, im] = self.h[r * self.d + c];
                m[(r, c)] = Complex64::new(re, im);
            }
        }
        let h = OneBodyMatrix::new(m)?;
        let w = TwoBodyTensor::from_terms(
            self.d,
            self.w_terms
                .iter()
                .map(|t| ((t.i, t.j, t.k, t.l), Complex64::new(t.re, t.im))),
        )?;
        Ok((h, w))
    }

    pub fn from_operators(h: &OneBodyMatrix, w: &TwoBodyTensor) -> Self {
        let d = h.dim();
        let mut hv = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let z = h.entries()[(r, c)];
                hv.push([z.re, z.im]);
            }
        }
        let w_terms = w
            .terms()
            .map(|((i, j, k, l), v)| WTerm { i, j, k, l, re: v.re, im: v.im })
            .collect();
        ModelFile { d, h: hv, w_terms }
    }
}

/// Serializable ground-state report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundStateReport {
    pub energy: f64,
    pub vector: Vec<[f64; 2]>,
    pub residual: f64,
    pub iterations: usize,
    pub degenerate: bool,
}

impl GroundStateReport {
    pub fn from_result(r: &GroundStateResult) -> Self {
        GroundStateReport {
            energy: r.energy,
            vector: r.vector.iter().map(|z| [z.re, z.im]).collect(),
            residual: r.solver_residual,
            iterations: r.iterations,
            degenerate: r.degenerate,
        }
    }
}
