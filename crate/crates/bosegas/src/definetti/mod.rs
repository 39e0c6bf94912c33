//! The lower-symbol (CKMR) de Finetti measure and its error rate.
//!
//! For a bosonic `N`-particle state `Γ_N` over `D` modes, the measure
//! `dμ_N(u) = D_N <u^{⊗N}|Γ_N|u^{⊗N}> du` on the unit sphere reconstructs
//! the normalized reduced matrices up to an error of order `D k / N`. This
//! module samples the measure (uniformly or with condensate-tilted
//! proposals), reconstructs `∫ |u^{⊗k}><u^{⊗k}| dμ_N` by Monte Carlo with
//! jackknife error bars, and measures the trace-norm distance against the
//! exact `Γ_N^{(k)}`.

pub mod symbols;

pub use symbols::{
    coherent_state, heat_forward, lower_symbol, normal_order_anti_wick, quantize,
    symbol_difference, upper_symbol, QuantizationOrder, SymbolPolynomial,
};

use crate::error::Error;
use crate::fock::{basis_dimension, condensate_coefficients, OccupationBasis};
use crate::linalg::{eigh, operator_norm_hermitian, trace_norm_hermitian};
use crate::manybody::{binomial_f64, reduced_density_matrix};
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform (Haar) sampler on the unit sphere of C^D.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    pub dim: usize,
    pub seed: u64,
    pub count: usize,
}

const CHUNK: usize = 4096;

impl SphereSampler {
    pub fn new(dim: usize, seed: u64, count: usize) -> Self {
        SphereSampler { dim, seed, count }
    }

    fn chunk_rng(&self, chunk: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (chunk as u64).wrapping_mul(0x9E3779B97F4A7C15))
    }
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

fn haar_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    // normalized complex Gaussian: exact Haar law, rejection free
    let mut v = DVector::<Complex64>::zeros(dim);
    for z in v.iter_mut() {
        let (a, b) = gaussian_pair(rng);
        *z = Complex64::new(a, b);
    }
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// A bosonic state on the `N`-particle sector.
#[derive(Debug, Clone)]
pub enum SectorState {
    Pure(DVector<Complex64>),
    /// Positive unit-trace matrix over the occupation basis.
    Mixed(DMatrix<Complex64>),
}

impl SectorState {
    pub fn validate(&self, basis: &OccupationBasis) -> Result<()> {
        match self {
            SectorState::Pure(psi) => {
                if psi.len() != basis.len() {
                    return Err(Error::dim("state vs basis size"));
                }
                if (psi.norm() - 1.0).abs() > 1e-8 {
                    return Err(Error::invalid("pure state must be normalized"));
                }
            }
            SectorState::Mixed(gamma) => {
                if gamma.nrows() != basis.len() || gamma.ncols() != basis.len() {
                    return Err(Error::dim("state vs basis size"));
                }
                let trace: f64 = (0..gamma.nrows()).map(|i| gamma[(i, i)].re).sum();
                if (trace - 1.0).abs() > 1e-8 {
                    return Err(Error::invalid("mixed state must have unit trace"));
                }
                let (values, _) = eigh(gamma);
                if values[0] < -1e-10 {
                    return Err(Error::invalid(format!(
                        "mixed state not positive (min eig {:.3e})",
                        values[0]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Spectral components `(p_i, v_i)` with `p_i > 1e-14`.
    fn components(&self) -> Vec<(f64, DVector<Complex64>)> {
        match self {
            SectorState::Pure(psi) => vec![(1.0, psi.clone())],
            SectorState::Mixed(gamma) => {
                let (values, vectors) = eigh(gamma);
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 1e-14)
                    .map(|(i, &p)| (p, vectors.column(i).into_owned()))
                    .collect()
            }
        }
    }

    /// Exact normalized reduced matrix `C(N,k)^{-1} Γ^{(k)}`; the k = 0
    /// case is the scalar 1.
    pub fn normalized_rdm(&self, basis: &OccupationBasis, k: usize) -> Result<DMatrix<Complex64>> {
        if k == 0 {
            return Ok(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
        }
        let n = basis.particles();
        let norm = Complex64::new(binomial_f64(n, k), 0.0);
        let mut acc: Option<DMatrix<Complex64>> = None;
        for (p, v) in self.components() {
            let rdm = reduced_density_matrix(basis, &v, k)?;
            let scaled = &rdm.matrix * Complex64::new(p, 0.0);
            acc = Some(match acc {
                Some(a) => a + scaled,
                None => scaled,
            });
        }
        Ok(acc.expect("state has at least one component") / norm)
    }
}

/// How sphere samples are proposed.
#[derive(Debug, Clone)]
pub enum SamplingStrategy {
    /// Raw Haar sampling. Fails for sharply peaked condensate weights once
    /// `N` is a few tens at small `D`.
    Uniform,
    /// Importance sampling from a mixture of `|<u_i, u>|^{2N}`-tilted
    /// proposals with analytic weight correction.
    Tilted { components: Vec<(f64, DVector<Complex64>)> },
}

/// Importance-weighted sample set of the CKMR measure.
#[derive(Debug, Clone)]
pub struct LowerSymbolMeasure {
    pub dim: usize,
    pub particles: usize,
    /// Unit vectors with weights; the sample mean of the weights estimates
    /// the measure's total mass (-> 1).
    pub samples: Vec<(DVector<Complex64>, f64)>,
}

impl LowerSymbolMeasure {
    pub fn mean_weight(&self) -> f64 {
        self.samples.iter().map(|(_, w)| w).sum::<f64>() / self.samples.len() as f64
    }

    pub fn weight_std_error(&self) -> f64 {
        let mean = self.mean_weight();
        let m = self.samples.len() as f64;
        let var = self
            .samples
            .iter()
            .map(|(_, w)| (w - mean) * (w - mean))
            .sum::<f64>()
            / (m - 1.0);
        (var / m).sqrt()
    }

    /// CSV export: one row per sample, re/im components of `u` then weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.dim {
            out.push_str(&format!("re_u{j},im_u{j},"));
        }
        out.push_str("weight\n");
        for (u, w) in &self.samples {
            for z in u.iter() {
                out.push_str(&format!("{},{},", z.re, z.im));
            }
            out.push_str(&format!("{w}\n"));
        }
        out
    }
}

/// `ln <u^{⊗N}|Γ|u^{⊗N}>` evaluated through the spectral components.
fn state_overlap(
    components: &[(f64, DVector<Complex64>)],
    basis: &OccupationBasis,
    u: &DVector<Complex64>,
) -> f64 {
    let coeffs = condensate_coefficients(basis, u);
    components
        .iter()
        .map(|(p, v)| {
            let overlap = coeffs.dotc(v).norm_sqr();
            p * overlap
        })
        .sum()
}

/// Sample the measure `dμ_N(u) = D_N <u^{⊗N}|Γ_N|u^{⊗N}> du`.
///
/// Sampling runs in fixed-size chunks with per-chunk RNG streams and a
/// deterministic merge order, so results do not depend on thread count.
pub fn ckmr_measure(
    state: &SectorState,
    basis: &OccupationBasis,
    sampler: &SphereSampler,
    strategy: &SamplingStrategy,
) -> Result<LowerSymbolMeasure> {
    state.validate(basis)?;
    let d = basis.modes();
    let n = basis.particles();
    if sampler.dim != d {
        return Err(Error::dim("sampler dimension vs basis modes"));
    }
    if let SamplingStrategy::Tilted { components } = strategy {
        if d < 2 {
            return Err(Error::invalid("tilted sampling needs D >= 2"));
        }
        if components.is_empty() {
            return Err(Error::invalid("tilted sampling needs at least one component"));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 || components.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::invalid("tilted mixture weights must be a distribution"));
        }
    }
    let d_n = basis_dimension(n, d)? as f64;
    let components = state.components();
    // ln Z for the tilted proposal: E_Haar[t^N] = N! (D-1)! / (N+D-1)!
    let ln_z: f64 = {
        let mut acc = 0.0;
        for i in 1..d {
            acc -= ((n + i) as f64).ln();
        }
        acc + (1..d).map(|i| (i as f64).ln()).sum::<f64>()
    };
    let chunks = sampler.count.div_ceil(CHUNK);
    let samples: Vec<(DVector<Complex64>, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = sampler.chunk_rng(chunk);
            let take = CHUNK.min(sampler.count - chunk * CHUNK);
            let mut out = Vec::with_capacity(take);
            for _ in 0..take {
                let (u, ln_density) = match strategy {
                    SamplingStrategy::Uniform => (haar_unit_vector(d, &mut rng), 0.0),
                    SamplingStrategy::Tilted { components: proposal } => {
                        // pick a component, then t ~ Beta(N+1, D-1)
                        let pick: f64 = rng.random();
                        let mut acc = 0.0;
                        let mut chosen = &proposal[0].1;
                        for (p, u0) in proposal {
                            acc += p;
                            if pick <= acc {
                                chosen = u0;
                                break;
                            }
                        }
                        let beta = Beta::new((n + 1) as f64, (d - 1) as f64)
                            .expect("valid Beta parameters");
                        let t: f64 = beta.sample(&mut rng);
                        // u = e^{iφ} sqrt(t) u0 + sqrt(1-t) v, v ⟂ u0 Haar
                        let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                        let mut v = haar_unit_vector(d, &mut rng);
                        let overlap = chosen.dotc(&v);
                        v -= chosen * overlap;
                        let vn = v.norm();
                        let v = if vn > 1e-12 {
                            v / Complex64::new(vn, 0.0)
                        } else {
                            // pathological draw: retry direction deterministically
                            let lead = chosen
                                .iter()
                                .enumerate()
                                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                                .map(|(i, _)| i)
                                .unwrap_or(0);
                            let mut w = DVector::<Complex64>::zeros(d);
                            w[(lead + 1) % d] = Complex64::new(1.0, 0.0);
                            let ov = chosen.dotc(&w);
                            w -= chosen * ov;
                            let wn = w.norm();
                            w / Complex64::new(wn, 0.0)
                        };
                        let u = chosen * Complex64::from_polar(t.sqrt(), phi)
                            + v * Complex64::new((1.0 - t).sqrt(), 0.0);
                        // proposal density wrt du: sum_i p_i t_i^N / Z
                        let mut density = 0.0;
                        for (p, u0) in proposal {
                            let ti = u0.dotc(&u).norm_sqr();
                            density += p * ti.powi(n as i32);
                        }
                        (u, density.max(1e-300).ln() - ln_z)
                    }
                };
                let overlap = state_overlap(&components, basis, &u);
                let weight = d_n * overlap * (-ln_density).exp();
                out.push((u, weight));
            }
            out
        })
        .flatten()
        .collect();
    for (_, w) in &samples {
        if *w < -1e-12 {
            return Err(Error::invalid(format!(
                "negative measure weight {w}: the input state is not positive"
            )));
        }
    }
    Ok(LowerSymbolMeasure { dim: d, particles: n, samples })
}

/// Monte Carlo reconstruction `∫ |u^{⊗k}><u^{⊗k}| dμ_N(u)` with per-block
/// partial sums for jackknife error bars.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub order: usize,
    pub matrix: DMatrix<Complex64>,
    /// Per-block partial sums `(sum of w |c><c|, samples in block)`.
    blocks: Vec<(DMatrix<Complex64>, usize)>,
}

pub const JACKKNIFE_BLOCKS: usize = 20;

impl Reconstruction {
    /// Leave-one-block-out estimates of a scalar functional, for jackknife.
    pub fn jackknife<F: Fn(&DMatrix<Complex64>) -> f64>(&self, f: F) -> (f64, f64) {
        let b = self.blocks.len();
        let total: DMatrix<Complex64> = {
            let mut acc = DMatrix::<Complex64>::zeros(self.matrix.nrows(), self.matrix.ncols());
            for (m, _) in &self.blocks {
                acc += m;
            }
            acc
        };
        let total_count: usize = self.blocks.iter().map(|(_, c)| c).sum();
        let full = f(&(&total / Complex64::new(total_count as f64, 0.0)));
        let mut estimates = Vec::with_capacity(b);
        for (m, c) in &self.blocks {
            let rest = &total - m;
            let count = total_count - c;
            estimates.push(f(&(&rest / Complex64::new(count as f64, 0.0))));
        }
        let mean = estimates.iter().sum::<f64>() / b as f64;
        let var = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() * (b as f64 - 1.0)
            / b as f64;
        (full, var.sqrt())
    }

    /// Smallest eigenvalue (positivity check up to MC noise).
    pub fn min_eigenvalue(&self) -> f64 {
        let (values, _) = eigh(&self.matrix);
        values[0]
    }
}

pub fn reconstruct_rdm(measure: &LowerSymbolMeasure, k: usize) -> Result<Reconstruction> {
    if k > measure.particles {
        return Err(Error::invalid("k must be <= N"));
    }
    let sector = OccupationBasis::new(k, measure.dim)?;
    let dim = sector.len();
    let m = measure.samples.len();
    let block_size = m.div_ceil(JACKKNIFE_BLOCKS);
    let blocks: Vec<(DMatrix<Complex64>, usize)> = measure
        .samples
        .par_chunks(block_size)
        .map(|chunk| {
            let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
            for (u, w) in chunk {
                let c = condensate_coefficients(&sector, u);
                // rank-one update w |c><c|
                for r in 0..dim {
                    for s in 0..dim {
                        acc[(r, s)] += c[r] * c[s].conj() * *w;
                    }
                }
            }
            (acc, chunk.len())
        })
        .collect();
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for (b, _) in &blocks {
        total += b;
    }
    let matrix = total / Complex64::new(m as f64, 0.0);
    Ok(Reconstruction { order: k, matrix, blocks })
}

/// Trace-norm distance between the exact normalized reduced matrix and the
/// Monte Carlo reconstruction, with jackknife error and the fitted constant
/// of the `C D k / N` bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefinettiError {
    pub trace_distance: f64,
    pub mc_sigma: f64,
    /// `distance * N / (D k)`.
    pub fitted_constant: f64,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
}

pub fn definetti_error(
    state: &SectorState,
    basis: &OccupationBasis,
    k: usize,
    sampler: &SphereSampler,
    strategy: &SamplingStrategy,
) -> Result<DefinettiError> {
    let measure = ckmr_measure(state, basis, sampler, strategy)?;
    let reconstruction = reconstruct_rdm(&measure, k)?;
    let exact = state.normalized_rdm(basis, k)?;
    let (distance, sigma) = reconstruction.jackknife(|m| {
        let diff = &exact - m;
        trace_norm_hermitian(&diff)
    });
    let n = basis.particles();
    let d = basis.modes();
    Ok(DefinettiError {
        trace_distance: distance,
        mc_sigma: sigma,
        fitted_constant: distance * n as f64 / (d as f64 * k as f64),
        d,
        n,
        k,
        samples: sampler.count,
        seed: sampler.seed,
    })
}

/// Operator-norm deviation of the Monte Carlo Schur resolution
/// `D_N ∫ |u^{⊗N}><u^{⊗N}| du` from the identity on the symmetric sector.
pub fn schur_check(d: usize, n: usize, sampler: &SphereSampler) -> Result<f64> {
    if sampler.dim != d {
        return Err(Error::dim("sampler dimension"));
    }
    let sector = OccupationBasis::new(n, d)?;
    let dim = sector.len();
    let d_n = dim as f64;
    let chunks = sampler.count.div_ceil(CHUNK);
    let partials: Vec<DMatrix<Complex64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = sampler.chunk_rng(chunk);
            let take = CHUNK.min(sampler.count - chunk * CHUNK);
            let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
            for _ in 0..take {
                let u = haar_unit_vector(d, &mut rng);
                let c = condensate_coefficients(&sector, &u);
                for r in 0..dim {
                    for s in 0..dim {
                        acc[(r, s)] += c[r] * c[s].conj();
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for p in partials {
        total += p;
    }
    total *= Complex64::new(d_n / sampler.count as f64, 0.0);
    let deviation = &total - DMatrix::<Complex64>::identity(dim, dim);
    Ok(operator_norm_hermitian(&deviation))
}

/// One row of an error-sweep export, keyed by `(D, N, k, M, seed)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorSweepRecord {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub trace_distance: f64,
    pub mc_sigma: f64,
    pub fitted_constant: f64,
}

impl From<&DefinettiError> for ErrorSweepRecord {
    fn from(e: &DefinettiError) -> Self {
        ErrorSweepRecord {
            d: e.d,
            n: e.n,
            k: e.k,
            m: e.samples,
            seed: e.seed,
            trace_distance: e.trace_distance,
            mc_sigma: e.mc_sigma,
            fitted_constant: e.fitted_constant,
        }
    }
}
