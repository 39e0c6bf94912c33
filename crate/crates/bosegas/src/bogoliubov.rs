//! Quadratic (Bogoliubov) Hamiltonians with pairing terms.
//!
//! For real symmetric blocks `H` (one-body) and `K` (pairing) with
//! `H - K ≻ 0`, the operator
//! `sum H_nm a†_n a_m + (1/2) sum K_nm (a†_n a†_m + a_m a_n)` has the
//! closed-form ground energy `E^Bog = (1/2) Tr(E - H)` with
//! `E = ((H-K)^{1/2} (H+K) (H-K)^{1/2})^{1/2}`. A truncated-Fock Lanczos
//! oracle checks the formula; quasi-free states supply the Wick rule; the
//! pair-correlation kernel bridges scattering and mean-field data.

use crate::error::Error;
use crate::fock::{LadderMonomial, TruncatedFockBasis};
use crate::lanczos::{lowest_eigenpair, LanczosOptions};
use crate::linalg::{eigh, eigh_real, sqrt_psd_real};
use crate::meanfield::Field;
use crate::scattering::ScatteringSolution;
use crate::sparse::SparseHermitian;
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Real symmetric pair `(H, K)` defining a Bogoliubov Hamiltonian.
///
/// Complex Hermitian one-body blocks can be handled by doubling the mode
/// space into real and imaginary parts; the diagonalization path itself is
/// kept real, which covers every experiment in this crate without
/// conjugation bookkeeping.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    h: DMatrix<f64>,
    k: DMatrix<f64>,
}

impl QuadraticHamiltonian {
    pub fn new(h: DMatrix<f64>, k: DMatrix<f64>) -> Result<Self> {
        let d = h.nrows();
        if h.ncols() != d || k.nrows() != d || k.ncols() != d {
            return Err(Error::dim("H and K must be square of equal size"));
        }
        let sym = |m: &DMatrix<f64>| -> f64 {
            let mut defect = 0.0f64;
            for i in 0..d {
                for j in 0..i {
                    defect = f64::max(defect, (m[(i, j)] - m[(j, i)]).abs());
                }
            }
            defect
        };
        if sym(&h) > 1e-12 || sym(&k) > 1e-12 {
            return Err(Error::invalid("H must be symmetric and K symmetric"));
        }
        let gap = &h - &k;
        let (gap_eigs, _) = eigh_real(&gap);
        if gap_eigs[0] <= 0.0 {
            return Err(Error::invalid(format!(
                "gap condition violated: min eig(H - K) = {:.6e}",
                gap_eigs[0]
            )));
        }
        let (sum_eigs, _) = eigh_real(&(&h + &k));
        if sum_eigs[0] < -1e-12 {
            return Err(Error::invalid(format!(
                "H + K must be positive semidefinite (min eig {:.6e})",
                sum_eigs[0]
            )));
        }
        Ok(QuadraticHamiltonian { h, k })
    }

    pub fn one_mode(h: f64, k: f64) -> Result<Self> {
        Self::new(
            DMatrix::from_element(1, 1, h),
            DMatrix::from_element(1, 1, k),
        )
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }
}

/// Closed-form diagonalization output.
#[derive(Debug, Clone)]
pub struct BogoliubovEnergy {
    /// `(1/2) Tr(E - H)`.
    pub ground_energy: f64,
    /// `E = ((H-K)^{1/2} (H+K) (H-K)^{1/2})^{1/2}`.
    pub e_matrix: DMatrix<f64>,
}

/// Ground-state energy of the Bogoliubov Hamiltonian by symmetric square
/// roots (eigenvalue floor 1e-12 keeps the roots well defined).
pub fn bogoliubov_ground_energy(qh: &QuadraticHamiltonian) -> BogoliubovEnergy {
    let root = sqrt_psd_real(&(qh.h() - qh.k()), 1e-12);
    let middle = &root * (qh.h() + qh.k()) * &root;
    let e_matrix = sqrt_psd_real(&middle, 0.0);
    let ground_energy = 0.5 * (e_matrix.trace() - qh.h().trace());
    BogoliubovEnergy { ground_energy, e_matrix }
}

/// `-(1/2) Tr(H^{-1} K²)`: a guaranteed lower bound to `E^Bog` (the sharper
/// constant is -1/4 plus a remainder with an unspecified constant, so only
/// the -1/2 form is asserted).
pub fn bogoliubov_lower_bound(qh: &QuadraticHamiltonian) -> Result<f64> {
    let inv = qh
        .h()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::invalid("H is singular"))?;
    let (h_eigs, _) = eigh_real(qh.h());
    if h_eigs[0] <= 0.0 {
        return Err(Error::invalid("the lower bound needs H positive definite"));
    }
    Ok(-0.5 * (inv * qh.k() * qh.k()).trace())
}

/// Assemble the second-quantized quadratic operator on the truncated Fock
/// space (occupations with total `<= cap`).
pub fn quadratic_operator(qh: &QuadraticHamiltonian, cap: usize) -> Result<SparseHermitian> {
    let d = qh.dim();
    let basis = TruncatedFockBasis::new(d, cap)?;
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut scratch = vec![0u32; d];
    for n in 0..=cap {
        let sector = basis.sector(n);
        for (local, occ) in sector.states().enumerate() {
            let col = basis.offset(n) + local;
            // one-body H_nm a†_n a_m
            for m in 0..d {
                if occ[m] == 0 {
                    continue;
                }
                for nn in 0..d {
                    let c = qh.h()[(nn, m)];
                    if c == 0.0 {
                        continue;
                    }
                    scratch.copy_from_slice(occ);
                    let mut amp2 = scratch[m] as f64;
                    scratch[m] -= 1;
                    scratch[nn] += 1;
                    amp2 *= scratch[nn] as f64;
                    if let Some(row) = basis.index_of(&scratch) {
                        if row >= col {
                            triplets.push((row, col, Complex64::new(c * amp2.sqrt(), 0.0)));
                        }
                    }
                }
            }
            // pairing (1/2) K_nm (a†_n a†_m + a_m a_n)
            for m in 0..d {
                for nn in 0..d {
                    let c = 0.5 * qh.k()[(nn, m)];
                    if c == 0.0 {
                        continue;
                    }
                    // a†_n a†_m: row in sector n+2 (kept only if <= cap)
                    scratch.copy_from_slice(occ);
                    scratch[m] += 1;
                    let mut amp2 = scratch[m] as f64;
                    scratch[nn] += 1;
                    amp2 *= scratch[nn] as f64;
                    if let Some(row) = basis.index_of(&scratch) {
                        if row >= col {
                            triplets.push((row, col, Complex64::new(c * amp2.sqrt(), 0.0)));
                        }
                    }
                    // a_m a_n
                    if occ[nn] > 0 {
                        scratch.copy_from_slice(occ);
                        let mut amp2 = scratch[nn] as f64;
                        scratch[nn] -= 1;
                        if scratch[m] > 0 {
                            amp2 *= scratch[m] as f64;
                            scratch[m] -= 1;
                            if let Some(row) = basis.index_of(&scratch) {
                                if row >= col {
                                    triplets
                                        .push((row, col, Complex64::new(c * amp2.sqrt(), 0.0)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(SparseHermitian::from_lower_triplets(basis.len(), triplets))
}

/// Truncated-Fock oracle for the ground energy.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    /// Lowest eigenvalue at each probed cap, increasing cap order.
    pub by_cap: Vec<(usize, f64)>,
    /// Value at the largest cap.
    pub lowest: f64,
    /// Aitken-extrapolated limit.
    pub extrapolated: f64,
}

/// Lowest eigenvalue of the truncated quadratic operator at caps
/// `cap - 8, cap - 4, cap`, with Aitken extrapolation of the geometric
/// truncation tail. The sequence decreases monotonically toward `E^Bog`.
pub fn bogoliubov_brute_force(qh: &QuadraticHamiltonian, cap: usize) -> Result<BruteForceResult> {
    if cap < 10 {
        return Err(Error::invalid("truncation cap must be at least 10"));
    }
    let caps = [cap - 8, cap - 4, cap];
    let mut by_cap = Vec::with_capacity(3);
    for &c in &caps {
        let op = quadratic_operator(qh, c)?;
        let opts = LanczosOptions { tol: 1e-12, ..LanczosOptions::default() };
        let out = lowest_eigenpair(|v| op.matvec(v), op.dim(), &opts);
        if !out.converged {
            return Err(Error::NoConvergence(format!(
                "truncated-Fock eigensolve stalled at cap {c} (residual {:.2e})",
                out.residual
            )));
        }
        by_cap.push((c, out.eigenvalue));
    }
    let (e0, e1, e2) = (by_cap[0].1, by_cap[1].1, by_cap[2].1);
    let denom = (e2 - e1) - (e1 - e0);
    let extrapolated = if denom.abs() > 1e-300 {
        let aitken = e2 - (e2 - e1) * (e2 - e1) / denom;
        // a diverging ratio means the tail is already at float noise
        if (e2 - e1).abs() < (e1 - e0).abs() {
            aitken
        } else {
            e2
        }
    } else {
        e2
    };
    Ok(BruteForceResult { by_cap, lowest: e2, extrapolated })
}

/// Quasi-free state data: one-body matrix `γ_ij = <a†_j a_i>` and pairing
/// matrix `α_ij = <a_i a_j>` (symmetric).
#[derive(Debug, Clone)]
pub struct QuasiFreeState {
    pub gamma: DMatrix<Complex64>,
    pub alpha: DMatrix<Complex64>,
}

/// Validation verdict for quasi-free data.
#[derive(Debug, Clone)]
pub enum QuasiFreeVerdict {
    ValidPure,
    ValidMixed,
    Invalid { witness: String },
}

const QF_TOL: f64 = 1e-10;

impl QuasiFreeState {
    pub fn new(gamma: DMatrix<Complex64>, alpha: DMatrix<Complex64>) -> Result<Self> {
        let d = gamma.nrows();
        if gamma.ncols() != d || alpha.nrows() != d || alpha.ncols() != d {
            return Err(Error::dim("gamma and alpha must be square of equal size"));
        }
        Ok(QuasiFreeState { gamma, alpha })
    }

    pub fn thermal_diagonal(occupations: &[f64]) -> Self {
        let d = occupations.len();
        let mut gamma = DMatrix::<Complex64>::zeros(d, d);
        for (i, &n) in occupations.iter().enumerate() {
            gamma[(i, i)] = Complex64::new(n, 0.0);
        }
        QuasiFreeState { gamma, alpha: DMatrix::zeros(d, d) }
    }

    /// One-mode squeezed vacuum: `γ = sinh²θ`, `α = e^{iφ} sinhθ coshθ`.
    pub fn squeezed_one_mode(theta: f64, phase: f64) -> Self {
        let gamma = DMatrix::from_element(1, 1, Complex64::new(theta.sinh().powi(2), 0.0));
        let alpha = DMatrix::from_element(
            1,
            1,
            Complex64::from_polar(theta.sinh() * theta.cosh(), phase),
        );
        QuasiFreeState { gamma, alpha }
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }
}

/// Check the block positivity `[[γ, α], [α†, 1 + γ̄]] ⪰ 0` and the purity
/// identities `α ᾱ = γ(1 + γ̄)`, `γ α = α γ̄`.
pub fn quasifree_validate(state: &QuasiFreeState) -> QuasiFreeVerdict {
    let d = state.dim();
    let herm: f64 = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (state.gamma[(i, j)] - state.gamma[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if herm > QF_TOL {
        return QuasiFreeVerdict::Invalid { witness: format!("gamma not Hermitian ({herm:.2e})") };
    }
    let asym: f64 = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (state.alpha[(i, j)] - state.alpha[(j, i)]).norm())
        .fold(0.0, f64::max);
    if asym > QF_TOL {
        return QuasiFreeVerdict::Invalid { witness: format!("alpha not symmetric ({asym:.2e})") };
    }
    let gamma_bar = state.gamma.map(|z| z.conj());
    let mut block = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            block[(i, j)] = state.gamma[(i, j)];
            block[(i, d + j)] = state.alpha[(i, j)];
            block[(d + i, j)] = state.alpha[(j, i)].conj();
            block[(d + i, d + j)] = gamma_bar[(i, j)] + if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
    }
    let (eigs, _) = eigh(&block);
    if eigs[0] < -QF_TOL {
        return QuasiFreeVerdict::Invalid {
            witness: format!("block matrix not psd (min eig {:.6e})", eigs[0]),
        };
    }
    let alpha_bar = state.alpha.map(|z| z.conj());
    let purity1 = (&state.alpha * &alpha_bar
        - &state.gamma * (DMatrix::<Complex64>::identity(d, d) + &gamma_bar))
        .norm();
    let purity2 = (&state.gamma * &state.alpha - &state.alpha * &gamma_bar).norm();
    if purity1 <= QF_TOL && purity2 <= QF_TOL {
        QuasiFreeVerdict::ValidPure
    } else {
        QuasiFreeVerdict::ValidMixed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OpKind {
    Create(usize),
    Annihilate(usize),
}

/// Expectation of a ladder monomial in a quasi-free state via the Wick rule:
/// sum over pairings of two-point functions, zero for odd degree.
pub fn wick_expectation(state: &QuasiFreeState, monomial: &LadderMonomial) -> Result<Complex64> {
    let d = state.dim();
    for &j in monomial.creators.iter().chain(monomial.annihilators.iter()) {
        if j >= d {
            return Err(Error::invalid("mode index out of range"));
        }
    }
    if monomial.degree() > 16 {
        return Err(Error::invalid("monomial degree cap is 16"));
    }
    let mut ops: Vec<OpKind> = Vec::with_capacity(monomial.degree());
    if monomial.normal_ordered {
        ops.extend(monomial.creators.iter().map(|&j| OpKind::Create(j)));
        ops.extend(monomial.annihilators.iter().map(|&j| OpKind::Annihilate(j)));
    } else {
        ops.extend(monomial.annihilators.iter().map(|&j| OpKind::Annihilate(j)));
        ops.extend(monomial.creators.iter().map(|&j| OpKind::Create(j)));
    }
    if ops.len() % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let contraction = |a: OpKind, b: OpKind| -> Complex64 {
        match (a, b) {
            (OpKind::Annihilate(i), OpKind::Annihilate(j)) => state.alpha[(i, j)],
            (OpKind::Create(i), OpKind::Create(j)) => state.alpha[(i, j)].conj(),
            (OpKind::Create(i), OpKind::Annihilate(j)) => state.gamma[(j, i)],
            (OpKind::Annihilate(i), OpKind::Create(j)) => {
                state.gamma[(i, j)] + if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            }
        }
    };
    fn pairings(
        ops: &[OpKind],
        contraction: &dyn Fn(OpKind, OpKind) -> Complex64,
    ) -> Complex64 {
        if ops.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let first = ops[0];
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..ops.len() {
            let factor = contraction(first, ops[j]);
            if factor.norm() == 0.0 {
                continue;
            }
            let mut rest = Vec::with_capacity(ops.len() - 2);
            rest.extend_from_slice(&ops[1..j]);
            rest.extend_from_slice(&ops[j + 1..]);
            acc += factor * pairings(&rest, contraction);
        }
        acc
    }
    Ok(pairings(&ops, &contraction))
}

/// Sign convention for the pair-correlation kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationSign {
    /// `k = N (f_N - 1) u u`.
    FMinusOne,
    /// `k = N (1 - f_N) u u`.
    OneMinusF,
}

/// Grid-sampled GP pair-correlation kernel built from a mean-field
/// minimizer and the scattering solution at scale `N`:
/// `k(x, y) = ± N (f_N(x - y) - 1) u(x) u(y)` with `f_N(r) = f(N r)`.
#[derive(Debug, Clone)]
pub struct PairKernel {
    pub matrix: DMatrix<Complex64>,
    pub sign: CorrelationSign,
}

pub fn pair_kernel(
    u: &Field,
    scattering: &ScatteringSolution,
    n: usize,
    sign: CorrelationSign,
) -> Result<PairKernel> {
    if n == 0 {
        return Err(Error::invalid("scale N must be >= 1"));
    }
    let grid = &u.grid;
    let scaled_support = scattering.support_radius() / n as f64;
    let min_len = (0..grid.dim).map(|a| grid.lengths[a]).fold(f64::INFINITY, f64::min);
    if scaled_support >= 0.5 * min_len {
        return Err(Error::dim(format!(
            "scaled interaction range {scaled_support:.3e} exceeds half the grid extent: grid and scattering scale mismatch"
        )));
    }
    let points = grid.len();
    let mut matrix = DMatrix::<Complex64>::zeros(points, points);
    let nf = n as f64;
    let signf = match sign {
        CorrelationSign::FMinusOne => 1.0,
        CorrelationSign::OneMinusF => -1.0,
    };
    for i in 0..points {
        for j in 0..=i {
            let disp = grid.displacement(j, i);
            let r: f64 = disp.iter().map(|&x| x * x).sum::<f64>().sqrt();
            let f_n = if r == 0.0 {
                scattering.f(0.0)
            } else {
                scattering.f(nf * r)
            };
            let value = Complex64::new(signf * nf * (f_n - 1.0), 0.0) * u.data[i] * u.data[j];
            matrix[(i, j)] = value;
            matrix[(j, i)] = value;
        }
    }
    Ok(PairKernel { matrix, sign })
}

/// Ingest `(H, K)` from two real matrices in the shared JSON matrix layout.
pub fn quadratic_from_model(
    h: &crate::manybody::OneBodyMatrix,
    k_entries: &DMatrix<f64>,
) -> Result<QuadraticHamiltonian> {
    let d = h.dim();
    let mut hr = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let z = h.entries()[(i, j)];
            if z.im.abs() > 1e-12 {
                return Err(Error::invalid(
                    "the real diagonalization path needs a real one-body block",
                ));
            }
            hr[(i, j)] = z.re;
        }
    }
    QuadraticHamiltonian::new(hr, k_entries.clone())
}

/// JSON report of a diagonalization run with the truncation trace.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BogoliubovReport {
    pub ground_energy: f64,
    pub lower_bound: f64,
    pub brute_force_by_cap: Vec<(usize, f64)>,
    pub brute_force_extrapolated: f64,
}

#[cfg(test)]
pub(crate) fn dense_quadratic(qh: &QuadraticHamiltonian, cap: usize) -> DMatrix<Complex64> {
    quadratic_operator(qh, cap).unwrap().to_dense()
}

#[cfg(test)]
mod tests;
