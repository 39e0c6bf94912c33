//! Jastrow and Dyson correlated trial wavefunctions with variational Monte
//! Carlo energy estimates.
//!
//! All wavefunction arithmetic runs in the log domain (a product of pair
//! factors over N(N-1)/2 pairs underflows otherwise). Correlated states
//! live on a periodic torus; trapped geometry is supported for the Product
//! kind. Two kinetic estimators are available: the log-Laplacian form
//! `-Δψ/ψ = -(Δ ln ψ + |∇ ln ψ|²)` (zero variance on exact eigenstates)
//! and the gradient form `|∇ ln ψ|²`, which integrates the quadratic form
//! correctly when the pair profile has a corner at the cutoff radius, as
//! the Dirichlet-normalized scattering factor does.

use crate::error::Error;
use crate::scattering::{RadialPotential, ScatteringSolution};
use crate::Result;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Geometry the walkers move in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Periodic cube of side `l` in three dimensions.
    Torus3 { l: f64 },
    /// Unbounded line (1D trapped problems, Product kind only).
    Line,
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Torus3 { .. } => 3,
            Domain::Line => 1,
        }
    }

    /// Minimum-image displacement `a - b`.
    pub fn displacement(&self, a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
        match self {
            Domain::Torus3 { l } => {
                let mut d = [0.0f64; 3];
                for k in 0..3 {
                    let mut x = a[k] - b[k];
                    x -= l * (x / l).round();
                    d[k] = x;
                }
                d
            }
            Domain::Line => [a[0] - b[0], 0.0, 0.0],
        }
    }

    pub fn distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let d = self.displacement(a, b);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    fn wrap(&self, x: &mut [f64; 3]) {
        if let Domain::Torus3 { l } = self {
            for c in x.iter_mut().take(3) {
                *c -= l * (*c / l).floor();
            }
        }
    }
}

/// One-body factor of the trial state.
#[derive(Debug, Clone)]
pub enum OneBodyFactor {
    /// Constant on the torus.
    Uniform,
    /// `u ∝ e^{-|x|²/2}` (the 1D harmonic ground state for `V = x²`).
    HarmonicGround,
    /// Positive samples on a 1D grid, interpolated as a natural cubic
    /// spline of `ln u` (trapped Product states fed from a minimizer).
    Spline1d(Spline1d),
}

impl OneBodyFactor {
    /// `ln u` up to an additive constant; None marks a node/outside point.
    fn ln_u(&self, x: &[f64; 3], dim: usize) -> Option<f64> {
        match self {
            OneBodyFactor::Uniform => Some(0.0),
            OneBodyFactor::HarmonicGround => {
                let r2: f64 = x[..dim].iter().map(|&c| c * c).sum();
                Some(-r2 / 2.0)
            }
            OneBodyFactor::Spline1d(s) => s.eval(x[0]).map(|(v, _, _)| v),
        }
    }

    fn grad_ln_u(&self, x: &[f64; 3], dim: usize) -> [f64; 3] {
        match self {
            OneBodyFactor::Uniform => [0.0; 3],
            OneBodyFactor::HarmonicGround => {
                let mut g = [0.0f64; 3];
                for k in 0..dim {
                    g[k] = -x[k];
                }
                g
            }
            OneBodyFactor::Spline1d(s) => {
                let d = s.eval(x[0]).map(|(_, d, _)| d).unwrap_or(0.0);
                [d, 0.0, 0.0]
            }
        }
    }

    fn lap_ln_u(&self, x: &[f64; 3], dim: usize) -> f64 {
        match self {
            OneBodyFactor::Uniform => 0.0,
            OneBodyFactor::HarmonicGround => -(dim as f64),
            OneBodyFactor::Spline1d(s) => s.eval(x[0]).map(|(_, _, dd)| dd).unwrap_or(0.0),
        }
    }
}

/// Natural cubic spline of `ln u` on a uniform 1D grid.
#[derive(Debug, Clone)]
pub struct Spline1d {
    x0: f64,
    h: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl Spline1d {
    /// Build from positive field samples on a uniform grid.
    pub fn from_positive_samples(x0: f64, h: f64, u: &[f64]) -> Result<Self> {
        if u.len() < 4 || h <= 0.0 {
            return Err(Error::invalid("need >= 4 samples with positive spacing"));
        }
        if u.iter().any(|&v| v <= 0.0) {
            return Err(Error::invalid("one-body factor must be strictly positive"));
        }
        let values: Vec<f64> = u.iter().map(|&v| v.ln()).collect();
        // natural cubic spline second derivatives (tridiagonal solve)
        let n = values.len();
        let mut second = vec![0.0f64; n];
        let mut diag = vec![0.0f64; n];
        let mut rhs = vec![0.0f64; n];
        diag[0] = 1.0;
        for i in 1..n - 1 {
            let sig = 0.5;
            let p = sig * diag[i - 1] + 2.0;
            diag[i] = (sig - 1.0) / p;
            rhs[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) * 3.0 / (h * h);
            rhs[i] = (rhs[i] - sig * rhs[i - 1]) / p;
        }
        for i in (1..n - 1).rev() {
            second[i] = diag[i] * second[i + 1] + rhs[i];
        }
        Ok(Spline1d { x0, h, values, second })
    }

    /// `(ln u, (ln u)', (ln u)'')`; None outside the sampled range.
    fn eval(&self, x: f64) -> Option<(f64, f64, f64)> {
        let t = (x - self.x0) / self.h;
        if t < 0.0 || t > (self.values.len() - 1) as f64 {
            return None;
        }
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let a = (i + 1) as f64 - t;
        let b = t - i as f64;
        let h2 = self.h * self.h;
        let v = a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h2 / 6.0;
        let d = (self.values[i + 1] - self.values[i]) / self.h
            + ((3.0 * b * b - 1.0) * self.second[i + 1] - (3.0 * a * a - 1.0) * self.second[i])
                * self.h
                / 6.0;
        let dd = a * self.second[i] + b * self.second[i + 1];
        Some((v, d, dd))
    }
}

/// Pair-correlation profile: Dirichlet-normalized scattering solution on
/// `[0, R]`, extended by 1 outside, with `f(R) = 1`.
#[derive(Debug, Clone)]
pub struct PairProfile {
    cutoff: f64,
    nodes: Vec<(f64, f64, f64)>,
}

impl PairProfile {
    /// `f_{R,N}(r) = f(N r) / f(N R)`, from the unscaled scattering solution.
    pub fn from_scattering(solution: &ScatteringSolution, n: usize, r_ball: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("scale must be >= 1"));
        }
        let nf = n as f64;
        if r_ball <= solution.support_radius() / nf {
            return Err(Error::invalid("cutoff must exceed the scaled potential range"));
        }
        let norm = solution.f(nf * r_ball);
        if norm <= 0.0 {
            return Err(Error::invalid("degenerate boundary normalization"));
        }
        let samples = 2000usize;
        let nodes = (0..=samples)
            .map(|i| {
                let r = r_ball * i as f64 / samples as f64;
                (
                    r,
                    solution.f(nf * r) / norm,
                    nf * solution.f_prime(nf * r) / norm,
                )
            })
            .collect();
        Ok(PairProfile { cutoff: r_ball, nodes })
    }

    /// Trivial profile `f ≡ 1` (used by tests to cross the Product limit).
    pub fn trivial(cutoff: f64) -> Self {
        PairProfile { cutoff, nodes: vec![(0.0, 1.0, 0.0), (cutoff, 1.0, 0.0)] }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `(f, f')`, with `f = 1, f' = 0` beyond the cutoff.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if r >= self.cutoff {
            return (1.0, 0.0);
        }
        let nodes = &self.nodes;
        if r <= nodes[0].0 {
            return (nodes[0].1, nodes[0].2);
        }
        let mut lo = 0usize;
        let mut hi = nodes.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if nodes[mid].0 <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (r0, f0, d0) = nodes[lo];
        let (r1, f1, d1) = nodes[hi];
        let h = r1 - r0;
        let t = (r - r0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let value = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
        let dh00 = 6.0 * t * (t - 1.0);
        let dh10 = (1.0 - t) * (1.0 - 3.0 * t);
        let dh01 = -6.0 * t * (t - 1.0);
        let dh11 = t * (3.0 * t - 2.0);
        let deriv = (dh00 * f0 + dh01 * f1) / h + dh10 * d0 + dh11 * d1;
        (value, deriv)
    }

    fn ln_f(&self, r: f64) -> f64 {
        let (f, _) = self.eval(r);
        f.max(1e-300).ln()
    }
}

/// Kind of correlation structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    Product,
    /// All pairs: `prod_{i<j} f(|x_i - x_j|)`.
    Jastrow,
    /// Nearest previous neighbor: `prod_j f(min_{k<j} |x_j - x_k|)`.
    Dyson,
}

/// A correlated trial wavefunction.
#[derive(Debug, Clone)]
pub struct CorrelatedTrialState {
    pub kind: TrialKind,
    pub one_body: OneBodyFactor,
    pub pair: Option<PairProfile>,
    pub domain: Domain,
}

impl CorrelatedTrialState {
    pub fn product(one_body: OneBodyFactor, domain: Domain) -> Self {
        CorrelatedTrialState { kind: TrialKind::Product, one_body, pair: None, domain }
    }

    pub fn jastrow(one_body: OneBodyFactor, pair: PairProfile, domain: Domain) -> Result<Self> {
        if domain == Domain::Line {
            return Err(Error::invalid("correlated kinds need the torus geometry"));
        }
        Ok(CorrelatedTrialState { kind: TrialKind::Jastrow, one_body, pair: Some(pair), domain })
    }

    pub fn dyson(one_body: OneBodyFactor, pair: PairProfile, domain: Domain) -> Result<Self> {
        if domain == Domain::Line {
            return Err(Error::invalid("correlated kinds need the torus geometry"));
        }
        Ok(CorrelatedTrialState { kind: TrialKind::Dyson, one_body, pair: Some(pair), domain })
    }

    fn pair_profile(&self) -> Option<&PairProfile> {
        match self.kind {
            TrialKind::Product => None,
            _ => self.pair.as_ref(),
        }
    }

    /// `ln |Ψ|` up to an additive constant; None at nodes/outside points.
    pub fn ln_psi(&self, positions: &[[f64; 3]]) -> Option<f64> {
        let dim = self.domain.dim();
        let mut acc = 0.0f64;
        for x in positions {
            acc += self.one_body.ln_u(x, dim)?;
        }
        match self.kind {
            TrialKind::Product => {}
            TrialKind::Jastrow => {
                let f = self.pair_profile().expect("jastrow has a pair profile");
                for i in 0..positions.len() {
                    for j in 0..i {
                        acc += f.ln_f(self.domain.distance(&positions[i], &positions[j]));
                    }
                }
            }
            TrialKind::Dyson => {
                let f = self.pair_profile().expect("dyson has a pair profile");
                let cells = CellList::build(self.domain, positions, f.cutoff());
                for j in 1..positions.len() {
                    if let Some((dist, _)) = cells.nearest_previous(positions, j) {
                        acc += f.ln_f(dist);
                    }
                }
            }
        }
        Some(acc)
    }

    /// Pair-factor log sum (0 for the Product kind).
    fn pair_ln(&self, positions: &[[f64; 3]]) -> f64 {
        match self.kind {
            TrialKind::Product => 0.0,
            TrialKind::Jastrow => {
                let f = self.pair_profile().expect("pair profile");
                let mut acc = 0.0;
                for i in 0..positions.len() {
                    for j in 0..i {
                        acc += f.ln_f(self.domain.distance(&positions[i], &positions[j]));
                    }
                }
                acc
            }
            TrialKind::Dyson => {
                let f = self.pair_profile().expect("pair profile");
                let cells = CellList::build(self.domain, positions, f.cutoff());
                let mut acc = 0.0;
                for j in 1..positions.len() {
                    if let Some((dist, _)) = cells.nearest_previous(positions, j) {
                        acc += f.ln_f(dist);
                    }
                }
                acc
            }
        }
    }

    /// Change of the Jastrow pair log-sum when particle `j` moved from
    /// `old` to `positions[j]` (positions already updated): O(N).
    fn jastrow_pair_delta(&self, positions: &[[f64; 3]], j: usize, old: &[f64; 3]) -> f64 {
        let f = self.pair_profile().expect("pair profile");
        let mut delta = 0.0;
        for (k, xk) in positions.iter().enumerate() {
            if k == j {
                continue;
            }
            let r_new = self.domain.distance(&positions[j], xk);
            let r_old = self.domain.distance(old, xk);
            // both beyond the cutoff: the factor is 1 on each side
            if r_new >= f.cutoff() && r_old >= f.cutoff() {
                continue;
            }
            delta += f.ln_f(r_new) - f.ln_f(r_old);
        }
        delta
    }

    /// `∇_j ln Ψ` for every particle.
    fn gradients(&self, positions: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let dim = self.domain.dim();
        let n = positions.len();
        let mut grads: Vec<[f64; 3]> = positions
            .iter()
            .map(|x| self.one_body.grad_ln_u(x, dim))
            .collect();
        match self.kind {
            TrialKind::Product => {}
            TrialKind::Jastrow => {
                let f = self.pair_profile().expect("pair profile");
                for i in 0..n {
                    for j in 0..i {
                        let d = self.domain.displacement(&positions[i], &positions[j]);
                        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                        if r >= f.cutoff() || r == 0.0 {
                            continue;
                        }
                        let (fv, fp) = f.eval(r);
                        let s = fp / fv.max(1e-300) / r;
                        for k in 0..3 {
                            grads[i][k] += s * d[k];
                            grads[j][k] -= s * d[k];
                        }
                    }
                }
            }
            TrialKind::Dyson => {
                let f = self.pair_profile().expect("pair profile");
                let cells = CellList::build(self.domain, positions, f.cutoff());
                for j in 1..n {
                    if let Some((r, k)) = cells.nearest_previous(positions, j) {
                        if r == 0.0 {
                            continue;
                        }
                        let d = self.domain.displacement(&positions[j], &positions[k]);
                        let (fv, fp) = f.eval(r);
                        let s = fp / fv.max(1e-300) / r;
                        for c in 0..3 {
                            grads[j][c] += s * d[c];
                            grads[k][c] -= s * d[c];
                        }
                    }
                }
            }
        }
        grads
    }

    /// `sum_j Δ_j ln Ψ` (Jastrow/Product only; the Dyson minimum rule is not
    /// twice differentiable, use the gradient estimator there).
    fn laplacian_ln(&self, positions: &[[f64; 3]]) -> Result<f64> {
        let dim = self.domain.dim();
        let mut acc: f64 = positions.iter().map(|x| self.one_body.lap_ln_u(x, dim)).sum();
        match self.kind {
            TrialKind::Product => {}
            TrialKind::Jastrow => {
                let f = self.pair_profile().expect("pair profile");
                for i in 0..positions.len() {
                    for j in 0..i {
                        let r = self.domain.distance(&positions[i], &positions[j]);
                        if r >= f.cutoff() || r == 0.0 {
                            continue;
                        }
                        let (fv, fp) = f.eval(r);
                        // second derivative of the Hermite segment
                        let eps = 1e-6 * f.cutoff();
                        let (_, fp_plus) = f.eval((r + eps).min(f.cutoff()));
                        let (_, fp_minus) = f.eval(r - eps);
                        let fpp = (fp_plus - fp_minus) / (2.0 * eps);
                        let lnf_pp = fpp / fv - (fp / fv) * (fp / fv);
                        let lnf_p = fp / fv;
                        // both particles: 2 * (lnf'' + 2 lnf'/r)
                        acc += 2.0 * (lnf_pp + 2.0 * lnf_p / r);
                    }
                }
            }
            TrialKind::Dyson => {
                return Err(Error::invalid(
                    "the Dyson kind needs the gradient-form kinetic estimator",
                ));
            }
        }
        Ok(acc)
    }
}

/// Kinetic-energy estimator used in the local energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticEstimator {
    /// `-Δψ/ψ` from log derivatives: zero variance on exact eigenstates,
    /// requires a C¹ wavefunction.
    LaplacianLog,
    /// `|∇ ln ψ|²`: integrates the quadratic form, correct across the
    /// cutoff corner of the pair profile.
    GradientForm,
}

/// External trap for the VMC Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapKind {
    Zero,
    /// `V = |x|²`.
    Harmonic,
}

impl TrapKind {
    fn eval(&self, x: &[f64; 3], dim: usize) -> f64 {
        match self {
            TrapKind::Zero => 0.0,
            TrapKind::Harmonic => x[..dim].iter().map(|&c| c * c).sum(),
        }
    }
}

/// Hamiltonian data for the VMC run: `H = sum_j (-Δ_j + V(x_j)) + sum w`.
#[derive(Debug, Clone)]
pub struct TrialHamiltonian {
    pub trap: TrapKind,
    /// Pair potential, already at the scale to be simulated.
    pub pair_potential: Option<RadialPotential>,
}

/// Local energy of a configuration.
pub fn local_energy(
    state: &CorrelatedTrialState,
    hamiltonian: &TrialHamiltonian,
    positions: &[[f64; 3]],
    estimator: KineticEstimator,
) -> Result<f64> {
    let dim = state.domain.dim();
    if state.ln_psi(positions).is_none() {
        return Err(Error::invalid("configuration at a node of the trial state"));
    }
    let grads = state.gradients(positions);
    let grad_sq: f64 = grads
        .iter()
        .map(|g| g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
        .sum();
    let kinetic = match estimator {
        KineticEstimator::GradientForm => grad_sq,
        KineticEstimator::LaplacianLog => -(state.laplacian_ln(positions)? + grad_sq),
    };
    let mut potential = 0.0f64;
    for x in positions {
        potential += hamiltonian.trap.eval(x, dim);
    }
    if let Some(w) = &hamiltonian.pair_potential {
        for i in 0..positions.len() {
            for j in 0..i {
                let r = state.domain.distance(&positions[i], &positions[j]);
                potential += w.eval(r);
            }
        }
    }
    Ok(kinetic + potential)
}

/// Cell list on the torus for fixed-radius neighbor queries (the Dyson
/// nearest-previous-neighbor rule only needs neighbors within the pair
/// cutoff: the profile is 1 beyond it).
struct CellList {
    domain: Domain,
    cells_per_axis: usize,
    cell_of: Vec<usize>,
    members: Vec<Vec<u32>>,
}

impl CellList {
    fn build(domain: Domain, positions: &[[f64; 3]], cutoff: f64) -> Self {
        let cells_per_axis = match domain {
            Domain::Torus3 { l } => ((l / cutoff).floor() as usize).clamp(1, 64),
            Domain::Line => 1,
        };
        let total = cells_per_axis.pow(3);
        let mut members = vec![Vec::new(); total];
        let mut cell_of = vec![0usize; positions.len()];
        for (i, x) in positions.iter().enumerate() {
            let c = Self::cell_index(domain, cells_per_axis, x);
            cell_of[i] = c;
            members[c].push(i as u32);
        }
        CellList { domain, cells_per_axis, cell_of, members }
    }

    fn cell_index(domain: Domain, m: usize, x: &[f64; 3]) -> usize {
        match domain {
            Domain::Torus3 { l } => {
                let f = |c: f64| -> usize {
                    let mut t = (c / l).rem_euclid(1.0);
                    if t >= 1.0 {
                        t = 0.0;
                    }
                    ((t * m as f64) as usize).min(m - 1)
                };
                f(x[0]) + m * (f(x[1]) + m * f(x[2]))
            }
            Domain::Line => 0,
        }
    }

    /// Distance and index of the nearest previous particle (`k < j`) within
    /// the cutoff; None when every previous particle is farther away.
    fn nearest_previous(&self, positions: &[[f64; 3]], j: usize) -> Option<(f64, usize)> {
        let m = self.cells_per_axis;
        let mut best: Option<(f64, usize)> = None;
        let mut consider = |k: usize| {
            if k < j {
                let r = self.domain.distance(&positions[j], &positions[k]);
                if best.map_or(true, |(b, _)| r < b) {
                    best = Some((r, k));
                }
            }
        };
        if m < 3 {
            for k in 0..j {
                consider(k);
            }
            return best;
        }
        let c = self.cell_of[j];
        let (cx, cy, cz) = (c % m, (c / m) % m, c / (m * m));
        for dx in [m - 1, 0, 1] {
            for dy in [m - 1, 0, 1] {
                for dz in [m - 1, 0, 1] {
                    let cell = ((cx + dx) % m) + m * (((cy + dy) % m) + m * ((cz + dz) % m));
                    for &k in &self.members[cell] {
                        consider(k as usize);
                    }
                }
            }
        }
        best
    }
}

/// VMC run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VmcConfig {
    pub walkers: usize,
    /// Sweeps sampled per walker (one local-energy sample per sweep).
    pub steps: usize,
    /// Burn-in sweeps per walker; step size adapts toward the 30-60%
    /// acceptance window during burn-in only.
    pub burn_in: usize,
    pub step_size: f64,
    pub seed: u64,
    pub estimator: KineticEstimator,
}

/// VMC estimate with blocking error bars.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VmcEstimate {
    pub energy_per_particle: f64,
    pub std_error: f64,
    pub acceptance_rate: f64,
    /// Integrated autocorrelation estimate from the blocking ratio.
    pub autocorrelation: f64,
    /// Per-block means of the per-particle energy.
    pub block_means: Vec<f64>,
    /// Split-chain diagnostic: set when some walker's half-means disagree
    /// beyond 5 combined sigma.
    pub equilibration_warning: bool,
}

struct WalkerRun {
    samples: Vec<f64>,
    accepted: usize,
    proposed: usize,
}

fn init_positions(
    state: &CorrelatedTrialState,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<[f64; 3]>> {
    for _attempt in 0..200 {
        let mut positions = Vec::with_capacity(n);
        for _ in 0..n {
            let x = match state.domain {
                Domain::Torus3 { l } => [
                    rng.random::<f64>() * l,
                    rng.random::<f64>() * l,
                    rng.random::<f64>() * l,
                ],
                Domain::Line => {
                    // Box-Muller draw matched to the harmonic ground state
                    let u1: f64 = rng.random::<f64>().max(1e-300);
                    let u2: f64 = rng.random();
                    let g = (-2.0 * u1.ln()).sqrt()
                        * (2.0 * std::f64::consts::PI * u2).cos();
                    [g / std::f64::consts::SQRT_2, 0.0, 0.0]
                }
            };
            positions.push(x);
        }
        if state.ln_psi(&positions).is_some() {
            return Ok(positions);
        }
    }
    Err(Error::invalid("could not place walkers off the nodes of the trial state"))
}

fn run_walker(
    state: &CorrelatedTrialState,
    hamiltonian: &TrialHamiltonian,
    particles: usize,
    cfg: &VmcConfig,
    walker: usize,
) -> Result<WalkerRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed ^ (walker as u64).wrapping_mul(0xD1B54A32D192ED03),
    );
    let mut positions = init_positions(state, particles, &mut rng)?;
    let mut pair_ln = state.pair_ln(&positions);
    let mut step = cfg.step_size;
    let dim = state.domain.dim();
    let mut accepted = 0usize;
    let mut proposed = 0usize;
    let mut window_accepted = 0usize;
    let mut window_proposed = 0usize;
    let mut samples = Vec::with_capacity(cfg.steps);
    for sweep in 0..cfg.burn_in + cfg.steps {
        for j in 0..particles {
            proposed += 1;
            window_proposed += 1;
            let mut trial = positions[j];
            for c in trial.iter_mut().take(dim) {
                *c += step * (rng.random::<f64>() * 2.0 - 1.0);
            }
            state.domain.wrap(&mut trial);
            let old = positions[j];
            // moves onto a node of u have |Ψ|² = 0 and are always rejected
            let one_body_delta = match (
                state.one_body.ln_u(&trial, dim),
                state.one_body.ln_u(&old, dim),
            ) {
                (Some(new), Some(prev)) => Some(new - prev),
                _ => None,
            };
            let accept = match one_body_delta {
                None => false,
                Some(du) => {
                    positions[j] = trial;
                    let dpair = match state.kind {
                        TrialKind::Product => 0.0,
                        TrialKind::Jastrow => state.jastrow_pair_delta(&positions, j, &old),
                        TrialKind::Dyson => state.pair_ln(&positions) - pair_ln,
                    };
                    let ratio = 2.0 * (du + dpair);
                    if ratio >= 0.0 || rng.random::<f64>() < ratio.exp() {
                        pair_ln += dpair;
                        true
                    } else {
                        positions[j] = old;
                        false
                    }
                }
            };
            if accept {
                accepted += 1;
                window_accepted += 1;
            }
        }
        // step adaptation toward the 30-60% window, during burn-in only
        if sweep < cfg.burn_in && window_proposed >= 100 {
            let rate = window_accepted as f64 / window_proposed as f64;
            if rate < 0.3 {
                step *= 0.8;
            } else if rate > 0.6 {
                let cap = match state.domain {
                    Domain::Torus3 { l } => l,
                    Domain::Line => 8.0,
                };
                step = (step * 1.25).min(cap);
            }
            window_accepted = 0;
            window_proposed = 0;
        }
        if sweep % 256 == 255 {
            // re-anchor the incremental log-sum (guards against drift)
            pair_ln = state.pair_ln(&positions);
        }
        if sweep >= cfg.burn_in {
            samples.push(local_energy(state, hamiltonian, &positions, cfg.estimator)?);
        }
    }
    Ok(WalkerRun { samples, accepted, proposed })
}

/// Metropolis estimate of `<Ψ|H|Ψ> / <Ψ|Ψ> / N`.
pub fn vmc_energy(
    state: &CorrelatedTrialState,
    hamiltonian: &TrialHamiltonian,
    particles: usize,
    cfg: &VmcConfig,
) -> Result<VmcEstimate> {
    if particles < 2 {
        return Err(Error::invalid("VMC needs N >= 2"));
    }
    if cfg.walkers == 0 || cfg.steps < 16 {
        return Err(Error::invalid("need at least one walker and 16 sampled sweeps"));
    }
    if state.kind == TrialKind::Dyson && cfg.estimator == KineticEstimator::LaplacianLog {
        return Err(Error::invalid(
            "the Dyson kind needs the gradient-form kinetic estimator",
        ));
    }
    let runs: Vec<Result<WalkerRun>> = (0..cfg.walkers)
        .into_par_iter()
        .map(|w| run_walker(state, hamiltonian, particles, cfg, w))
        .collect();
    let mut all_runs = Vec::with_capacity(cfg.walkers);
    for r in runs {
        all_runs.push(r?);
    }
    let scale = 1.0 / particles as f64;
    let mut equilibration_warning = false;
    for run in &all_runs {
        let half = run.samples.len() / 2;
        let m1 = run.samples[..half].iter().sum::<f64>() / half as f64;
        let m2 = run.samples[half..].iter().sum::<f64>() / (run.samples.len() - half) as f64;
        let var: f64 = run
            .samples
            .iter()
            .map(|&x| {
                let mu = (m1 + m2) / 2.0;
                (x - mu) * (x - mu)
            })
            .sum::<f64>()
            / run.samples.len() as f64;
        let sigma = (2.0 * var / half as f64).sqrt();
        if (m1 - m2).abs() > 5.0 * sigma.max(1e-12) {
            equilibration_warning = true;
        }
    }
    // blocking: split each walker's series into blocks, pool the blocks
    let per_walker_blocks = 16usize.min(all_runs[0].samples.len() / 4).max(1);
    let mut block_means = Vec::new();
    let mut raw_mean = 0.0f64;
    let mut raw_count = 0usize;
    for run in &all_runs {
        let len = run.samples.len() / per_walker_blocks;
        for b in 0..per_walker_blocks {
            let chunk = &run.samples[b * len..(b + 1) * len];
            block_means.push(chunk.iter().sum::<f64>() / chunk.len() as f64 * scale);
        }
        raw_mean += run.samples.iter().sum::<f64>();
        raw_count += run.samples.len();
    }
    raw_mean = raw_mean / raw_count as f64 * scale;
    let nb = block_means.len() as f64;
    let mean = block_means.iter().sum::<f64>() / nb;
    let block_var = block_means.iter().map(|&b| (b - mean) * (b - mean)).sum::<f64>()
        / (nb - 1.0).max(1.0);
    let std_error = (block_var / nb).sqrt();
    // autocorrelation from the blocking ratio
    let mut raw_var = 0.0f64;
    for run in &all_runs {
        for &x in &run.samples {
            let v = x * scale - raw_mean;
            raw_var += v * v;
        }
    }
    raw_var /= (raw_count as f64 - 1.0).max(1.0);
    let block_len = all_runs[0].samples.len() / per_walker_blocks;
    let autocorrelation = if raw_var > 0.0 {
        (block_len as f64 * block_var / raw_var).max(1.0)
    } else {
        1.0
    };
    let accepted: usize = all_runs.iter().map(|r| r.accepted).sum();
    let proposed: usize = all_runs.iter().map(|r| r.proposed).sum();
    Ok(VmcEstimate {
        energy_per_particle: mean,
        std_error: std_error.max(1e-300),
        acceptance_rate: accepted as f64 / proposed as f64,
        autocorrelation,
        block_means,
        equilibration_warning,
    })
}

/// Deterministic oracle for N = 2 on the torus with a constant one-body
/// factor: the center of mass separates and the per-particle energy is a
/// radial quadrature in the relative coordinate,
/// `E/N = (1/2) [ ∫ (2 f'² + w f²) ] / [ L³ + ∫ (f² - 1) ]`.
pub fn exact_two_body_energy(
    state: &CorrelatedTrialState,
    hamiltonian: &TrialHamiltonian,
    l: f64,
) -> Result<f64> {
    if !matches!(state.one_body, OneBodyFactor::Uniform) {
        return Err(Error::invalid("the two-body oracle needs a constant one-body factor"));
    }
    let profile = match state.kind {
        TrialKind::Product => None,
        _ => state.pair.as_ref(),
    };
    let cutoff = profile.map(|p| p.cutoff()).unwrap_or(0.0);
    let support = hamiltonian
        .pair_potential
        .as_ref()
        .map(|w| w.support_radius())
        .unwrap_or(0.0);
    let rmax = cutoff.max(support);
    if rmax >= 0.5 * l {
        return Err(Error::invalid("interaction range exceeds half the torus"));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let cells = 200_000usize;
    let mut numerator = 0.0f64;
    let mut deficit = 0.0f64;
    if rmax > 0.0 {
        let h = rmax / cells as f64;
        for i in 0..cells {
            let r = (i as f64 + 0.5) * h;
            let (f, fp) = profile.map(|p| p.eval(r)).unwrap_or((1.0, 0.0));
            let w = hamiltonian.pair_potential.as_ref().map(|w| w.eval(r)).unwrap_or(0.0);
            numerator += h * (2.0 * fp * fp + w * f * f) * r * r;
            deficit += h * (f * f - 1.0) * r * r;
        }
    }
    let volume = l * l * l;
    let energy_total = four_pi * numerator / (volume + four_pi * deficit);
    Ok(0.5 * energy_total)
}
