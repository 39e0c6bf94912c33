//! Continuum mean-field functionals: Hartree, NLS and Gross-Pitaevskii.
//!
//! Fields live on uniform lattices with either periodic or box (Dirichlet)
//! boundary. The kinetic term is gauge covariant through link (Peierls)
//! phases, which makes the diamagnetic inequality exact at finite spacing:
//! the energy of `u` with `A != 0` never drops below the energy of `|u|`
//! with `A = 0`.

use crate::error::Error;
use crate::linalg::eigh_real;
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Boundary handling for the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Dirichlet walls; fields are expected to decay before the edge.
    Box,
}

/// Uniform lattice in d = 1, 2 or 3 dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub shape: [usize; 3],
    pub lengths: [f64; 3],
    pub boundary: Boundary,
}

pub const MAX_GRID_POINTS: usize = 4_000_000;

impl Grid {
    pub fn new(dim: usize, shape: &[usize], lengths: &[f64], boundary: Boundary) -> Result<Self> {
        if dim == 0 || dim > 3 || shape.len() != dim || lengths.len() != dim {
            return Err(Error::invalid("grid needs 1 <= d <= 3 with matching shape/lengths"));
        }
        let mut sh = [1usize; 3];
        let mut ln = [1.0f64; 3];
        for a in 0..dim {
            if shape[a] < 2 || lengths[a] <= 0.0 {
                return Err(Error::invalid("grid axes need >= 2 points and positive length"));
            }
            sh[a] = shape[a];
            ln[a] = lengths[a];
        }
        let total: usize = sh.iter().product();
        if total > MAX_GRID_POINTS {
            return Err(Error::invalid(format!("grid of {total} points exceeds the cap")));
        }
        Ok(Grid { dim, shape: sh, lengths: ln, boundary })
    }

    pub fn line(points: usize, length: f64, boundary: Boundary) -> Result<Self> {
        Self::new(1, &[points], &[length], boundary)
    }

    pub fn cube(dim: usize, points: usize, length: f64, boundary: Boundary) -> Result<Self> {
        Self::new(dim, &vec![points; dim], &vec![length; dim], boundary)
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// Coordinate of a site: periodic grids start at 0, box grids are
    /// cell-centered around the origin.
    pub fn coord(&self, index: usize, axis: usize) -> f64 {
        let i = self.axis_index(index, axis);
        match self.boundary {
            Boundary::Periodic => i as f64 * self.spacing(axis),
            Boundary::Box => -0.5 * self.lengths[axis] + (i as f64 + 0.5) * self.spacing(axis),
        }
    }

    pub fn position(&self, index: usize) -> [f64; 3] {
        let mut x = [0.0f64; 3];
        for a in 0..self.dim {
            x[a] = self.coord(index, a);
        }
        x
    }

    pub fn axis_index(&self, index: usize, axis: usize) -> usize {
        let mut rem = index;
        for a in 0..axis {
            rem /= self.shape[a];
        }
        rem % self.shape[axis]
    }

    pub fn flat_index(&self, idx: &[usize; 3]) -> usize {
        idx[0] + self.shape[0] * (idx[1] + self.shape[1] * idx[2])
    }

    /// Forward neighbor along `axis`, or None at a box wall.
    pub fn neighbor(&self, index: usize, axis: usize) -> Option<usize> {
        let i = self.axis_index(index, axis);
        let stride: usize = self.shape[..axis].iter().product();
        if i + 1 < self.shape[axis] {
            Some(index + stride)
        } else {
            match self.boundary {
                Boundary::Periodic => Some(index - i * stride),
                Boundary::Box => None,
            }
        }
    }

    /// Minimum-image displacement between two sites along each axis.
    pub fn displacement(&self, from: usize, to: usize) -> [f64; 3] {
        let mut d = [0.0f64; 3];
        for a in 0..self.dim {
            let mut delta = self.coord(to, a) - self.coord(from, a);
            if self.boundary == Boundary::Periodic {
                let l = self.lengths[a];
                delta -= l * (delta / l).round();
            }
            d[a] = delta;
        }
        d
    }
}

/// Complex scalar field on a grid.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid,
    pub data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field { grid: grid.clone(), data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn constant_normalized(grid: &Grid) -> Self {
        let volume: f64 = (0..grid.dim).map(|a| grid.lengths[a]).product();
        let value = Complex64::new(1.0 / volume.sqrt(), 0.0);
        Field { grid: grid.clone(), data: vec![value; grid.len()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64; 3]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Field { grid: grid.clone(), data }
    }

    /// `∫ |u|²` with the lattice quadrature.
    pub fn mass(&self) -> f64 {
        let dv = self.grid.cell_volume();
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * dv
    }

    pub fn normalize(&mut self) {
        let m = self.mass().sqrt();
        if m > 0.0 {
            for z in self.data.iter_mut() {
                *z /= m;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// `∫ conj(self) other`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        let dv = self.grid.cell_volume();
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * dv
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn abs(&self) -> Field {
        Field {
            grid: self.grid.clone(),
            data: self.data.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
        }
    }

    /// `∫ |u|⁴`.
    pub fn quartic_integral(&self) -> f64 {
        let dv = self.grid.cell_volume();
        self.data.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>() * dv
    }

    pub fn density(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Named trapping potentials.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PotentialPreset {
    Zero,
    /// `|x|²` (1D harmonic spectrum `2n + 1` in these units).
    Harmonic,
    /// `c |x|^s`.
    Anharmonic { c: f64, s: f64 },
}

impl PotentialPreset {
    pub fn eval(&self, x: &[f64; 3], dim: usize) -> f64 {
        let r2: f64 = x[..dim].iter().map(|&c| c * c).sum();
        match self {
            PotentialPreset::Zero => 0.0,
            PotentialPreset::Harmonic => r2,
            PotentialPreset::Anharmonic { c, s } => c * r2.sqrt().powf(*s),
        }
    }

    /// Growth exponent `s` in `V ~ |x|^s`, when declared.
    pub fn growth_exponent(&self) -> Option<f64> {
        match self {
            PotentialPreset::Zero => None,
            PotentialPreset::Harmonic => Some(2.0),
            PotentialPreset::Anharmonic { s, .. } => Some(*s),
        }
    }
}

/// Named gauge fields.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GaugePreset {
    Zero,
    /// Uniform rotation `A = Ω (-y, x, 0)`.
    Rotation { omega: f64 },
}

impl GaugePreset {
    pub fn eval(&self, x: &[f64; 3], axis: usize) -> f64 {
        match self {
            GaugePreset::Zero => 0.0,
            GaugePreset::Rotation { omega } => match axis {
                0 => -omega * x[1],
                1 => omega * x[0],
                _ => 0.0,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GaugePreset::Zero)
            || matches!(self, GaugePreset::Rotation { omega } if *omega == 0.0)
    }
}

/// Scalar trap plus gauge field, sampled on the grid: `v` on sites and
/// `a_links[axis]` on the forward links (midpoint sampling keeps the link
/// phases consistent).
#[derive(Debug, Clone)]
pub struct ExternalFields {
    pub v: Vec<f64>,
    pub a_links: [Vec<f64>; 3],
    pub v_preset: PotentialPreset,
    pub a_preset: GaugePreset,
}

impl ExternalFields {
    pub fn sample(grid: &Grid, v: PotentialPreset, a: GaugePreset) -> Self {
        let n = grid.len();
        let vs = (0..n).map(|i| v.eval(&grid.position(i), grid.dim)).collect();
        let mut links: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (axis, slot) in links.iter_mut().enumerate().take(grid.dim) {
            *slot = (0..n)
                .map(|i| {
                    let mut mid = grid.position(i);
                    mid[axis] += 0.5 * grid.spacing(axis);
                    a.eval(&mid, axis)
                })
                .collect();
        }
        ExternalFields { v: vs, a_links: links, v_preset: v, a_preset: a }
    }
}

/// Interaction term of the functional.
#[derive(Debug, Clone)]
pub enum Interaction {
    /// Non-local `(1/2) ∬ |u|² w(x-y) |u|²` with a sampled kernel.
    Hartree(HartreeKernel),
    /// Local `(b_w/2) ∫ |u|⁴`.
    Nls { b_w: f64 },
    /// Local `4π a_w ∫ |u|⁴`.
    Gp { a_w: f64 },
}

/// Kernel samples on the displacement lattice, plus its transform for the
/// fast convolution path.
#[derive(Debug, Clone)]
pub struct HartreeKernel {
    samples: Vec<f64>,
    grid: Grid,
}

impl HartreeKernel {
    /// Gaussian kernel `amp e^{-|x|²/(2σ²)}` sampled with minimum-image
    /// displacements (periodic) or plain displacements (box).
    pub fn gaussian(grid: &Grid, amp: f64, sigma: f64) -> Self {
        let samples = (0..grid.len())
            .map(|i| {
                let mut r2 = 0.0;
                for a in 0..grid.dim {
                    let mut d = grid.coord(i, a) - grid.coord(0, a);
                    if grid.boundary == Boundary::Periodic {
                        let l = grid.lengths[a];
                        d -= l * (d / l).round();
                    }
                    r2 += d * d;
                }
                amp * (-r2 / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        HartreeKernel { samples, grid: grid.clone() }
    }

    /// `b_w = ∫ w` on the lattice.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// `w ⋆ ρ` through the FFT (circular for periodic grids, zero-padded
    /// linear convolution for box grids).
    pub fn convolve(&self, rho: &[f64]) -> Vec<f64> {
        match self.grid.boundary {
            Boundary::Periodic => {
                let mut kernel: Vec<Complex64> =
                    self.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                let mut density: Vec<Complex64> =
                    rho.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                fft_nd(&mut kernel, &self.grid.shape, self.grid.dim, false);
                fft_nd(&mut density, &self.grid.shape, self.grid.dim, false);
                for (k, d) in kernel.iter_mut().zip(density.iter()) {
                    *k *= d;
                }
                fft_nd(&mut kernel, &self.grid.shape, self.grid.dim, true);
                let dv = self.grid.cell_volume();
                kernel.iter().map(|z| z.re * dv).collect()
            }
            Boundary::Box => {
                // zero-pad to double size per axis; kernel recentered
                let mut padded_shape = [1usize; 3];
                for a in 0..self.grid.dim {
                    padded_shape[a] = 2 * self.grid.shape[a];
                }
                let padded_len: usize = padded_shape.iter().product();
                let mut kernel = vec![Complex64::new(0.0, 0.0); padded_len];
                let mut density = vec![Complex64::new(0.0, 0.0); padded_len];
                let shape = self.grid.shape;
                for i in 0..self.grid.len() {
                    let ix = [
                        self.grid.axis_index(i, 0),
                        if self.grid.dim > 1 { self.grid.axis_index(i, 1) } else { 0 },
                        if self.grid.dim > 2 { self.grid.axis_index(i, 2) } else { 0 },
                    ];
                    let pi = ix[0] + padded_shape[0] * (ix[1] + padded_shape[1] * ix[2]);
                    density[pi] = Complex64::new(rho[i], 0.0);
                    // displacement components of sample i are coord(i)-coord(0),
                    // non-negative; mirror them into the padded wrap positions
                    let mut targets = vec![(0usize, 0usize, 0usize)];
                    let push_axis = |targets: &mut Vec<(usize, usize, usize)>, axis: usize| {
                        let idx = ix[axis];
                        let extra: Vec<(usize, usize, usize)> = targets
                            .iter()
                            .filter(|_| idx > 0)
                            .map(|&t| match axis {
                                0 => (padded_shape[0] - idx, t.1, t.2),
                                1 => (t.0, padded_shape[1] - idx, t.2),
                                _ => (t.0, t.1, padded_shape[2] - idx),
                            })
                            .collect();
                        for (slot, t) in targets.iter_mut().enumerate() {
                            *t = match axis {
                                0 => (ix[0], t.1, t.2),
                                1 => (t.0, ix[1], t.2),
                                _ => (t.0, t.1, ix[2]),
                            };
                            let _ = slot;
                        }
                        targets.extend(extra);
                    };
                    push_axis(&mut targets, 0);
                    if self.grid.dim > 1 {
                        push_axis(&mut targets, 1);
                    }
                    if self.grid.dim > 2 {
                        push_axis(&mut targets, 2);
                    }
                    let value = Complex64::new(self.samples[i], 0.0);
                    for (tx, ty, tz) in targets {
                        kernel[tx + padded_shape[0] * (ty + padded_shape[1] * tz)] = value;
                    }
                    let _ = shape;
                }
                fft_nd(&mut kernel, &padded_shape, self.grid.dim, false);
                fft_nd(&mut density, &padded_shape, self.grid.dim, false);
                for (k, d) in kernel.iter_mut().zip(density.iter()) {
                    *k *= d;
                }
                fft_nd(&mut kernel, &padded_shape, self.grid.dim, true);
                let dv = self.grid.cell_volume();
                (0..self.grid.len())
                    .map(|i| {
                        let ix = [
                            self.grid.axis_index(i, 0),
                            if self.grid.dim > 1 { self.grid.axis_index(i, 1) } else { 0 },
                            if self.grid.dim > 2 { self.grid.axis_index(i, 2) } else { 0 },
                        ];
                        let pi = ix[0] + padded_shape[0] * (ix[1] + padded_shape[1] * ix[2]);
                        kernel[pi].re * dv
                    })
                    .collect()
            }
        }
    }
}

/// In-place n-dimensional FFT (axis-by-axis 1D transforms).
fn fft_nd(data: &mut [Complex64], shape: &[usize; 3], dim: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = shape.iter().product();
    for axis in 0..dim {
        let n = shape[axis];
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let stride: usize = shape[..axis].iter().product();
        let lines = total / n;
        let mut buffer = vec![Complex64::new(0.0, 0.0); n];
        for line in 0..lines {
            // decompose the line index into (inner, outer) parts around axis
            let inner = line % stride;
            let outer = line / stride;
            let base = inner + outer * stride * n;
            for k in 0..n {
                buffer[k] = data[base + k * stride];
            }
            fft.process(&mut buffer);
            for k in 0..n {
                data[base + k * stride] = buffer[k];
            }
        }
    }
    if inverse {
        let scale = 1.0 / total as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

/// A mean-field minimization problem on a grid.
#[derive(Debug, Clone)]
pub struct MeanFieldProblem {
    pub grid: Grid,
    pub fields: ExternalFields,
    pub interaction: Interaction,
}

impl MeanFieldProblem {
    pub fn new(grid: Grid, fields: ExternalFields, interaction: Interaction) -> Self {
        MeanFieldProblem { grid, fields, interaction }
    }

    pub fn gp(grid: &Grid, v: PotentialPreset, a: GaugePreset, a_w: f64) -> Self {
        let fields = ExternalFields::sample(grid, v, a);
        MeanFieldProblem::new(grid.clone(), fields, Interaction::Gp { a_w })
    }

    pub fn nls(grid: &Grid, v: PotentialPreset, a: GaugePreset, b_w: f64) -> Self {
        let fields = ExternalFields::sample(grid, v, a);
        MeanFieldProblem::new(grid.clone(), fields, Interaction::Nls { b_w })
    }

    /// Gauge-covariant kinetic energy `sum_links |D u|² dV` of a field.
    pub fn kinetic_energy(&self, u: &Field) -> f64 {
        let grid = &self.grid;
        let dv = grid.cell_volume();
        let mut acc = 0.0;
        for axis in 0..grid.dim {
            let h = grid.spacing(axis);
            let links = &self.fields.a_links[axis];
            for i in 0..grid.len() {
                match grid.neighbor(i, axis) {
                    Some(j) => {
                        let theta = h * links[i];
                        let phase = Complex64::from_polar(1.0, -theta);
                        let diff = u.data[j] * phase - u.data[i];
                        acc += diff.norm_sqr() / (h * h);
                    }
                    None => {
                        // Dirichlet wall: |0 - u|² on the outgoing link
                        acc += u.data[i].norm_sqr() / (h * h);
                    }
                }
            }
            // left wall links for box boundary
            if grid.boundary == Boundary::Box {
                for i in 0..grid.len() {
                    if grid.axis_index(i, axis) == 0 {
                        acc += u.data[i].norm_sqr() / (h * h);
                    }
                }
            }
        }
        acc * dv
    }

    pub fn potential_energy(&self, u: &Field) -> f64 {
        let dv = self.grid.cell_volume();
        u.data
            .iter()
            .zip(self.fields.v.iter())
            .map(|(z, &v)| v * z.norm_sqr())
            .sum::<f64>()
            * dv
    }

    pub fn interaction_energy(&self, u: &Field) -> f64 {
        match &self.interaction {
            Interaction::Hartree(kernel) => {
                let rho = u.density();
                let conv = kernel.convolve(&rho);
                let dv = self.grid.cell_volume();
                0.5 * rho.iter().zip(conv.iter()).map(|(r, c)| r * c).sum::<f64>() * dv
            }
            Interaction::Nls { b_w } => 0.5 * b_w * u.quartic_integral(),
            Interaction::Gp { a_w } => 4.0 * std::f64::consts::PI * a_w * u.quartic_integral(),
        }
    }

    /// Total energy; rejects unnormalized fields.
    pub fn energy(&self, u: &Field) -> Result<f64> {
        if (u.mass() - 1.0).abs() > 1e-8 {
            return Err(Error::invalid(format!("field mass {} != 1", u.mass())));
        }
        Ok(self.energy_unchecked(u))
    }

    pub fn energy_unchecked(&self, u: &Field) -> f64 {
        self.kinetic_energy(u) + self.potential_energy(u) + self.interaction_energy(u)
    }

    /// `H[u] u`: the operator whose quadratic form is the energy,
    /// `(K + V + V_int[u]) u` with the density-dependent interaction term.
    pub fn hamiltonian_apply(&self, u: &Field) -> Field {
        let grid = &self.grid;
        let mut out = Field::zeros(grid);
        // gauge Laplacian: adjoint of the link differences
        for axis in 0..grid.dim {
            let h = grid.spacing(axis);
            let links = &self.fields.a_links[axis];
            let h2 = h * h;
            for i in 0..grid.len() {
                let mut acc = Complex64::new(0.0, 0.0);
                match grid.neighbor(i, axis) {
                    Some(j) => {
                        let phase = Complex64::from_polar(1.0, -h * links[i]);
                        acc += (u.data[i] - u.data[j] * phase) / h2;
                    }
                    None => {
                        acc += u.data[i] / h2;
                    }
                }
                // backward link
                let back = (0..grid.len()).contains(&i).then(|| self.backward(i, axis));
                if let Some(Some(j)) = back {
                    let phase = Complex64::from_polar(1.0, h * links[j]);
                    acc += (u.data[i] - u.data[j] * phase) / h2;
                } else if grid.boundary == Boundary::Box {
                    acc += u.data[i] / h2;
                }
                out.data[i] += acc;
            }
        }
        let interaction_field: Vec<f64> = match &self.interaction {
            Interaction::Hartree(kernel) => kernel.convolve(&u.density()),
            Interaction::Nls { b_w } => u.density().iter().map(|&r| b_w * r).collect(),
            Interaction::Gp { a_w } => {
                let c = 8.0 * std::f64::consts::PI * a_w;
                u.density().iter().map(|&r| c * r).collect()
            }
        };
        for i in 0..grid.len() {
            out.data[i] += u.data[i] * (self.fields.v[i] + interaction_field[i]);
        }
        out
    }

    fn backward(&self, index: usize, axis: usize) -> Option<usize> {
        let grid = &self.grid;
        let i = grid.axis_index(index, axis);
        let stride: usize = grid.shape[..axis].iter().product();
        if i > 0 {
            Some(index - stride)
        } else {
            match grid.boundary {
                Boundary::Periodic => Some(index + (grid.shape[axis] - 1) * stride),
                Boundary::Box => None,
            }
        }
    }

    /// Euler-Lagrange residual `|| H[u] u - μ u ||` with
    /// `μ = <u, H[u] u>`. For GP, `μ = E + 4π a ∫|u|⁴` at a minimizer.
    pub fn equation_residual(&self, u: &Field) -> (f64, f64) {
        let hu = self.hamiltonian_apply(u);
        let mu = u.inner(&hu).re;
        let dv = self.grid.cell_volume();
        let res: f64 = hu
            .data
            .iter()
            .zip(u.data.iter())
            .map(|(h, z)| (h - z * Complex64::new(mu, 0.0)).norm_sqr())
            .sum::<f64>()
            * dv;
        (res.sqrt(), mu)
    }
}

/// Verdict of the NLS stability assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    /// 2D borderline: `b_w` within the numerical uncertainty of `-a*`.
    Conditional { a_star: f64 },
}

static A_STAR_CACHE: std::sync::OnceLock<f64> = std::sync::OnceLock::new();

/// Cached 2D Gagliardo-Nirenberg constant at the default resolution.
pub fn a_star_default() -> f64 {
    *A_STAR_CACHE.get_or_init(|| {
        gagliardo_nirenberg_constant(&GnResolution::default()).expect("default GN resolution")
    })
}

/// Stability of the NLS functional: 1D always; 2D needs `b_w > -a*`;
/// 3D needs `b_w >= 0`.
pub fn stability_check(dim: usize, b_w: f64, a_star: Option<f64>) -> StabilityVerdict {
    match dim {
        1 => StabilityVerdict::Stable,
        2 => {
            let a_star = a_star.unwrap_or_else(a_star_default);
            // the constant itself is only known to grid accuracy
            let tol = 1e-2 * a_star;
            if (b_w + a_star).abs() <= tol {
                StabilityVerdict::Conditional { a_star }
            } else if b_w > -a_star {
                StabilityVerdict::Stable
            } else {
                StabilityVerdict::Unstable
            }
        }
        _ => {
            if b_w >= 0.0 {
                StabilityVerdict::Stable
            } else {
                StabilityVerdict::Unstable
            }
        }
    }
}

/// Resolution spec for the radial Gagliardo-Nirenberg minimization.
#[derive(Debug, Clone, Copy)]
pub struct GnResolution {
    pub r_max: f64,
    pub cells: usize,
}

impl Default for GnResolution {
    fn default() -> Self {
        GnResolution { r_max: 14.0, cells: 1200 }
    }
}

/// Best constant `a*` in the 2D inequality
/// `(a*/2) ∫|u|⁴ <= (∫|u|²)(∫|∇u|²)`, computed by minimizing the quotient
/// `J[u] = 2 (∫u²)(∫u'²) / ∫u⁴` over radial fields.
pub fn gagliardo_nirenberg_constant(res: &GnResolution) -> Result<f64> {
    if res.cells < 16 {
        return Err(Error::invalid("need at least 16 radial cells"));
    }
    // warm-started refinement ladder: coarse solves seed finer ones so the
    // descent converges at every resolution
    let mut ladder = vec![res.cells];
    while *ladder.last().unwrap() > 200 {
        ladder.push(ladder.last().unwrap() / 2);
    }
    ladder.reverse();
    let mut seed: Option<Vec<f64>> = None;
    let mut value = 0.0;
    for cells in ladder {
        let (v, u) = gn_minimize_level(res.r_max, cells, seed.as_deref())?;
        value = v;
        seed = Some(u);
    }
    Ok(value)
}

fn gn_minimize_level(r_max: f64, n: usize, seed: Option<&[f64]>) -> Result<(f64, Vec<f64>)> {
    let h = r_max / n as f64;
    // cell-centered radial samples
    let rs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mass = |u: &[f64]| -> f64 { two_pi * h * u.iter().zip(&rs).map(|(&x, &r)| x * x * r).sum::<f64>() };
    let quartic =
        |u: &[f64]| -> f64 { two_pi * h * u.iter().zip(&rs).map(|(&x, &r)| x * x * x * x * r).sum::<f64>() };
    // |∇u|² = ∫ u'(r)² 2π r dr with u' on interior faces (Neumann at 0)
    let kinetic = |u: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let du = (u[i + 1] - u[i]) / h;
            let rf = (i as f64 + 1.0) * h;
            acc += du * du * rf;
        }
        // Dirichlet tail at r_max
        let du = (0.0 - u[n - 1]) / h;
        acc += du * du * (n as f64) * h;
        two_pi * h * acc
    };
    let quotient = |u: &[f64]| -> f64 { 2.0 * mass(u) * kinetic(u) / quartic(u) };
    // gradient of J = 2 A B / C with A = mass, B = kinetic, C = quartic
    let gradient = |u: &[f64]| -> Vec<f64> {
        let a = mass(u);
        let b = kinetic(u);
        let c = quartic(u);
        let mut g = vec![0.0f64; n];
        for i in 0..n {
            // dA/du_i = 2 u_i r_i (2π h), dC/du_i = 4 u_i³ r_i (2π h)
            let da = 2.0 * u[i] * rs[i] * two_pi * h;
            let dc = 4.0 * u[i] * u[i] * u[i] * rs[i] * two_pi * h;
            // dB/du_i from the two adjacent face differences
            let mut db = 0.0;
            if i + 1 < n {
                let rf = (i as f64 + 1.0) * h;
                db += -2.0 * (u[i + 1] - u[i]) / h * rf / h;
            } else {
                let rf = n as f64 * h;
                db += 2.0 * u[i] / h * rf / h;
            }
            if i > 0 {
                let rf = i as f64 * h;
                db += 2.0 * (u[i] - u[i - 1]) / h * rf / h;
            }
            db *= two_pi * h;
            g[i] = 2.0 * (da * b / c + a * db / c - a * b * dc / (c * c));
        }
        g
    };
    let mut u: Vec<f64> = match seed {
        Some(coarse) => {
            // linear interpolation from the coarse cell centers
            let cn = coarse.len();
            let ch = r_max / cn as f64;
            rs.iter()
                .map(|&r| {
                    let t = (r / ch - 0.5).clamp(0.0, cn as f64 - 1.0);
                    let i = (t.floor() as usize).min(cn - 2);
                    let frac = t - i as f64;
                    coarse[i] * (1.0 - frac) + coarse[i + 1] * frac
                })
                .collect()
        }
        None => rs.iter().map(|&r| (-r * r / 4.0).exp()).collect(),
    };
    let mut value = quotient(&u);
    let mut step = 1e-2;
    let slack = |v: f64| 1e-15 * (1.0 + v.abs());
    for _ in 0..120_000 {
        let g = gradient(&u);
        let gnorm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-10 * value {
            break;
        }
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> =
                u.iter().zip(g.iter()).map(|(&x, &gx)| x - step * gx).collect();
            let tv = quotient(&trial);
            if tv <= value + slack(value) {
                u = trial;
                if tv < value - slack(value) {
                    step *= 1.25;
                }
                value = tv;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((value, u))
}

/// Spectral moment `sum_{λ_j <= Λ} λ_j^δ` of the discrete one-body operator
/// `-Δ + V` on the grid (Dirichlet walls for box boundary).
pub fn eigenvalue_count(
    grid: &Grid,
    v: PotentialPreset,
    lambda: f64,
    delta: f64,
) -> Result<f64> {
    let spectrum = one_body_spectrum(grid, v)?;
    let top = *spectrum.last().unwrap();
    if lambda > 0.7 * top {
        return Err(Error::invalid(format!(
            "cutoff {lambda} beyond the resolvable spectrum (grid top {top:.3})"
        )));
    }
    Ok(spectrum
        .iter()
        .filter(|&&x| x <= lambda)
        .map(|&x| if delta == 0.0 { 1.0 } else { x.powf(delta) })
        .sum())
}

/// All eigenvalues of the discrete `-Δ + V` (dense; keep grids modest).
pub fn one_body_spectrum(grid: &Grid, v: PotentialPreset) -> Result<Vec<f64>> {
    let n = grid.len();
    if n > 3000 {
        return Err(Error::invalid("grid too large for a dense spectrum"));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] += v.eval(&grid.position(i), grid.dim);
        for axis in 0..grid.dim {
            let h2 = grid.spacing(axis) * grid.spacing(axis);
            m[(i, i)] += 2.0 / h2;
            if let Some(j) = grid.neighbor(i, axis) {
                m[(i, j)] -= 1.0 / h2;
                m[(j, i)] -= 1.0 / h2;
            }
        }
    }
    let (values, _) = eigh_real(&m);
    Ok(values)
}

/// Starting point for the minimizer.
#[derive(Debug, Clone)]
pub enum MinimizerInit {
    /// Positive Gaussian blob (trapped problems).
    GroundOfLinear,
    /// Constant field (periodic problems).
    Uniform,
    Field(Field),
}

#[derive(Debug, Clone)]
pub struct MinimizerResult {
    pub u: Field,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected-gradient (normalized imaginary time) descent with backtracking;
/// the energy never increases across accepted steps.
pub fn minimize(
    problem: &MeanFieldProblem,
    init: MinimizerInit,
    tol: f64,
    max_iter: usize,
) -> Result<MinimizerResult> {
    match &problem.interaction {
        Interaction::Nls { b_w } => {
            if stability_check(problem.grid.dim, *b_w, None) == StabilityVerdict::Unstable {
                return Err(Error::Instability(format!(
                    "NLS functional unstable in d={} with b_w={b_w}",
                    problem.grid.dim
                )));
            }
        }
        Interaction::Gp { a_w } => {
            if *a_w < 0.0 {
                return Err(Error::Instability("GP needs a_w >= 0".into()));
            }
        }
        Interaction::Hartree(_) => {}
    }
    let mut u = match init {
        MinimizerInit::Uniform => Field::constant_normalized(&problem.grid),
        MinimizerInit::GroundOfLinear => Field::from_fn(&problem.grid, |x| {
            let r2: f64 = x.iter().map(|&c| c * c).sum();
            Complex64::new((-r2 / 2.0).exp() + 1e-3, 0.0)
        })
        .normalized(),
        MinimizerInit::Field(f) => {
            if f.grid != problem.grid {
                return Err(Error::dim("initial field grid mismatch"));
            }
            f.normalized()
        }
    };
    let mut energy = problem.energy_unchecked(&u);
    let floor = -1e8;
    let mut step = 0.5 * problem.grid.spacing(0) * problem.grid.spacing(0);
    let mut gradient_norm = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;
    // Phase A: monotone energy descent with backtracking. Near the minimum
    // the energy differences drop below summation roundoff, so once the
    // gradient is small we switch to phase B: fixed-step iterations watched
    // through the residual norm only (it keeps contracting long after the
    // energy has saturated).
    let residual_of = |problem: &MeanFieldProblem, u: &Field| -> (Field, f64) {
        let hu = problem.hamiltonian_apply(u);
        let mu = u.inner(&hu).re;
        let mut r = hu;
        for (x, z) in r.data.iter_mut().zip(u.data.iter()) {
            *x -= z * Complex64::new(mu, 0.0);
        }
        let n = r.l2_norm();
        (r, n)
    };
    let noise = 1e-13 * (1.0 + energy.abs());
    let phase_b_entry = (1e-6 * (1.0 + energy.abs())).max(tol);
    while iterations < max_iter {
        iterations += 1;
        let (residual, gnorm) = residual_of(problem, &u);
        gradient_norm = gnorm;
        if gradient_norm <= tol {
            converged = true;
            break;
        }
        if gradient_norm <= phase_b_entry {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = u.clone();
            for (t, r) in trial.data.iter_mut().zip(residual.data.iter()) {
                *t -= r * Complex64::new(step, 0.0);
            }
            trial.normalize();
            let te = problem.energy_unchecked(&trial);
            if te <= energy + noise {
                u = trial;
                if te < energy - noise {
                    step *= 1.3;
                }
                energy = te;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if energy < floor {
            return Err(Error::Instability(format!(
                "energy diverged below {floor} after {iterations} iterations (last E = {energy:.3e})"
            )));
        }
        if !accepted {
            break;
        }
    }
    // Phase B
    if !converged {
        let mut grow = 0usize;
        let mut previous = gradient_norm;
        while iterations < max_iter {
            iterations += 1;
            let (residual, gnorm) = residual_of(problem, &u);
            gradient_norm = gnorm;
            if gradient_norm <= tol {
                converged = true;
                break;
            }
            if gradient_norm > previous {
                grow += 1;
                if grow >= 3 {
                    step *= 0.5;
                    grow = 0;
                    if step < 1e-18 {
                        break;
                    }
                }
            } else {
                grow = 0;
            }
            previous = gradient_norm;
            for (t, r) in u.data.iter_mut().zip(residual.data.iter()) {
                *t -= r * Complex64::new(step, 0.0);
            }
            u.normalize();
        }
        energy = problem.energy_unchecked(&u);
    }
    if !converged && gradient_norm > tol {
        return Err(Error::NoConvergence(format!(
            "descent stalled at gradient norm {gradient_norm:.3e} (tol {tol:.1e}) after {iterations} iterations, energy {energy:.12}"
        )));
    }
    Ok(MinimizerResult { u, energy, gradient_norm, iterations, converged })
}

/// Declarative problem description (TOML/JSON): grid spec, named
/// potential/gauge presets and the interaction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dim: usize,
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
    pub boundary: Boundary,
    pub potential: PotentialPreset,
    #[serde(default = "default_gauge")]
    pub gauge: GaugePreset,
    pub interaction: InteractionSpec,
}

fn default_gauge() -> GaugePreset {
    GaugePreset::Zero
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractionSpec {
    HartreeGaussian { amp: f64, sigma: f64 },
    Nls { b_w: f64 },
    Gp { a_w: f64 },
}

impl ProblemSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad problem spec: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad problem spec: {e}")))
    }

    pub fn build(&self) -> Result<MeanFieldProblem> {
        let grid = Grid::new(self.dim, &self.points, &self.lengths, self.boundary)?;
        let fields = ExternalFields::sample(&grid, self.potential, self.gauge);
        let interaction = match &self.interaction {
            InteractionSpec::HartreeGaussian { amp, sigma } => {
                Interaction::Hartree(HartreeKernel::gaussian(&grid, *amp, *sigma))
            }
            InteractionSpec::Nls { b_w } => Interaction::Nls { b_w: *b_w },
            InteractionSpec::Gp { a_w } => Interaction::Gp { a_w: *a_w },
        };
        Ok(MeanFieldProblem::new(grid, fields, interaction))
    }
}

// ---------------------------------------------------------------------------
// binary field dump + JSON summary

const FIELD_MAGIC: &[u8; 4] = b"BGF1";

/// Minimizer summary written next to the binary field dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizerSummary {
    pub energy: f64,
    pub residual: f64,
    pub mass: f64,
}

/// Write a field as a little-endian binary dump.
pub fn write_field(mut sink: impl Write, field: &Field) -> Result<()> {
    sink.write_all(FIELD_MAGIC)?;
    sink.write_all(&(field.grid.dim as u8).to_le_bytes())?;
    sink.write_all(&[match field.grid.boundary {
        Boundary::Periodic => 0u8,
        Boundary::Box => 1u8,
    }])?;
    for a in 0..3 {
        sink.write_all(&(field.grid.shape[a] as u64).to_le_bytes())?;
    }
    for a in 0..3 {
        sink.write_all(&field.grid.lengths[a].to_le_bytes())?;
    }
    for z in &field.data {
        sink.write_all(&z.re.to_le_bytes())?;
        sink.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Read a field dump back.
pub fn read_field(mut source: impl Read) -> Result<Field> {
    let mut magic = [0u8; 4];
    source.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Config("not a field dump".into()));
    }
    let mut byte = [0u8; 1];
    source.read_exact(&mut byte)?;
    let dim = byte[0] as usize;
    source.read_exact(&mut byte)?;
    let boundary = if byte[0] == 0 { Boundary::Periodic } else { Boundary::Box };
    let mut u64buf = [0u8; 8];
    let mut shape = [1usize; 3];
    for slot in shape.iter_mut() {
        source.read_exact(&mut u64buf)?;
        *slot = u64::from_le_bytes(u64buf) as usize;
    }
    let mut lengths = [1.0f64; 3];
    for slot in lengths.iter_mut() {
        source.read_exact(&mut u64buf)?;
        *slot = f64::from_le_bytes(u64buf);
    }
    let grid = Grid::new(dim, &shape[..dim], &lengths[..dim], boundary)?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        source.read_exact(&mut u64buf)?;
        let re = f64::from_le_bytes(u64buf);
        source.read_exact(&mut u64buf)?;
        let im = f64::from_le_bytes(u64buf);
        data.push(Complex64::new(re, im));
    }
    Ok(Field { grid, data })
}
