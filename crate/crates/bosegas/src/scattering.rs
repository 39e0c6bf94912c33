//! The zero-energy two-body scattering problem for radial 3D potentials.
//!
//! Solves `-Δf + (1/2) w f = 0` with `f -> 1` at infinity by adaptive
//! integration of `u'' = (1/2) w u` for `u = r f`, reads the scattering
//! length off the exact exterior form `f = 1 - a/r`, and builds the derived
//! quantities: finite-ball energies, the Born series, Dyson potential
//! softening, and Onsager's classical lower bound.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Base radial profile shapes, all supported on `[0, 1]` before scaling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ProfileKind {
    /// `w = 1` on `[0, 1)`.
    SquareWell,
    /// Smooth bump `exp(1 - 1/(1 - x^2))`, equal to 1 at the origin.
    Bump,
    /// `(1 - x^2)_+`.
    Parabolic,
    /// Tabulated samples on `[0, 1]`, linearly interpolated.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

impl ProfileKind {
    fn eval(&self, x: f64) -> f64 {
        if x >= 1.0 || x < 0.0 {
            return 0.0;
        }
        match self {
            ProfileKind::SquareWell => 1.0,
            ProfileKind::Bump => (1.0 - 1.0 / (1.0 - x * x)).exp() * std::f64::consts::E,
            ProfileKind::Parabolic => 1.0 - x * x,
            ProfileKind::Tabulated { x: xs, v } => {
                if xs.is_empty() {
                    return 0.0;
                }
                match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
                    Ok(i) => v[i],
                    Err(0) => v[0],
                    Err(i) if i >= xs.len() => 0.0,
                    Err(i) => {
                        let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                        v[i - 1] * (1.0 - t) + v[i] * t
                    }
                }
            }
        }
    }
}

/// A non-negative radial potential `w(r) = amp * base(r / len)` with compact
/// support of radius `len`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialPotential {
    pub base: ProfileKind,
    pub amp: f64,
    pub len: f64,
}

impl RadialPotential {
    pub fn new(base: ProfileKind, amp: f64, len: f64) -> Result<Self> {
        if amp < 0.0 || len <= 0.0 {
            return Err(Error::invalid("potential needs amp >= 0 and len > 0"));
        }
        if let ProfileKind::Tabulated { x, v } = &base {
            if x.len() != v.len() || x.is_empty() {
                return Err(Error::invalid("tabulated profile needs matching nonempty columns"));
            }
            if x.windows(2).any(|wd| wd[1] <= wd[0]) {
                return Err(Error::invalid("tabulated radii must be strictly increasing"));
            }
            if v.iter().any(|&y| y < 0.0) {
                return Err(Error::invalid("potential must be non-negative"));
            }
        }
        Ok(RadialPotential { base, amp, len })
    }

    pub fn square_well(v0: f64, r0: f64) -> Result<Self> {
        Self::new(ProfileKind::SquareWell, v0, r0)
    }

    pub fn bump(amp: f64, r0: f64) -> Result<Self> {
        Self::new(ProfileKind::Bump, amp, r0)
    }

    pub fn parabolic(amp: f64, r0: f64) -> Result<Self> {
        Self::new(ProfileKind::Parabolic, amp, r0)
    }

    /// Ingest a two-column CSV `r, w(r)`; the last radius sets the support.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let r: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("bad radius on line {}", lineno + 1)))?;
            let w: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("bad value on line {}", lineno + 1)))?;
            xs.push(r);
            vs.push(w);
        }
        if xs.len() < 2 {
            return Err(Error::Config("need at least two samples".into()));
        }
        let len = *xs.last().unwrap();
        let x: Vec<f64> = xs.iter().map(|&r| r / len).collect();
        Self::new(ProfileKind::Tabulated { x, v: vs }, 1.0, len)
    }

    pub fn support_radius(&self) -> f64 {
        self.len
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.amp * self.base.eval(r / self.len)
    }

    pub fn is_zero(&self) -> bool {
        self.amp == 0.0
    }

    /// `∫ w = 4π ∫ w(r) r² dr` (midpoint rule, robust at the support edge).
    pub fn integral_3d(&self) -> f64 {
        let n = 40_000usize;
        let h = self.len / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let rm = (i as f64 + 0.5) * h;
            acc += h * self.eval(rm) * rm * rm;
        }
        4.0 * std::f64::consts::PI * acc
    }
}

/// How the amplitude scales with `N` when the potential is shortened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialScaling {
    /// `w_N(x) = N^{dβ-1} w(N^β x)`: the full scaled pair potential (for
    /// d = 3, β = 1 this is the Gross-Pitaevskii `N² w(Nx)`).
    FullStrength,
    /// `w_N(x) = N^{dβ} w(N^β x)`: the `1/(N-1)` factor is bookkept in the
    /// many-body assembly instead.
    PairBookkept,
}

/// Scale a potential: range shrinks by `N^{-β}`, amplitude grows per the
/// declared convention.
pub fn scale_potential(
    w: &RadialPotential,
    n: usize,
    beta: f64,
    dim: usize,
    convention: PotentialScaling,
) -> Result<RadialPotential> {
    if n < 2 {
        return Err(Error::invalid("scaling needs N >= 2"));
    }
    if beta < 0.0 {
        return Err(Error::invalid("beta must be >= 0"));
    }
    let nf = n as f64;
    let exponent = match convention {
        PotentialScaling::FullStrength => dim as f64 * beta - 1.0,
        PotentialScaling::PairBookkept => dim as f64 * beta,
    };
    RadialPotential::new(w.base.clone(), w.amp * nf.powf(exponent), w.len * nf.powf(-beta))
}


/// Composite midpoint quadrature split at known discontinuity radii.
fn segmented_midpoint(f: &dyn Fn(f64) -> f64, from: f64, to: f64, breaks: &[f64], cells: usize) -> f64 {
    let mut edges: Vec<f64> = vec![from, to];
    for &b in breaks {
        if b > from && b < to {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    let mut acc = 0.0;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let n = ((cells as f64 * (b - a) / (to - from)).ceil() as usize).max(64);
        let h = (b - a) / n as f64;
        for i in 0..n {
            acc += h * f(a + (i as f64 + 0.5) * h);
        }
    }
    acc
}

/// One accepted integration node of `u = r f`.
#[derive(Debug, Clone, Copy)]
struct Node {
    r: f64,
    u: f64,
    du: f64,
}

/// Dormand-Prince 5(4) adaptive integration of `u'' = (1/2) w(r) u` from
/// `r = a` to `r = b`, appending accepted nodes.
fn integrate_radial(
    w: &RadialPotential,
    a: f64,
    b: f64,
    y: &mut [f64; 2],
    tol: f64,
    h_max: f64,
    nodes: &mut Vec<Node>,
) -> Result<()> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

    let f = |r: f64, y: &[f64; 2]| -> [f64; 2] { [y[1], 0.5 * w.eval(r) * y[0]] };

    let mut r = a;
    let span = b - a;
    let mut h = (span / 64.0).min(h_max).max(1e-290);
    let mut steps = 0usize;
    while b - r > 1e-13 * span {
        if steps > 2_000_000 {
            return Err(Error::NoConvergence(format!(
                "radial integration stalled near r = {r:.6e}; the profile needs finer resolution"
            )));
        }
        steps += 1;
        if r + h > b {
            h = b - r;
        }
        let k1 = f(r + C[0] * h, y);
        let y2 = [y[0] + h * A21 * k1[0], y[1] + h * A21 * k1[1]];
        let k2 = f(r + C[1] * h, &y2);
        let y3 = [
            y[0] + h * (A31 * k1[0] + A32 * k2[0]),
            y[1] + h * (A31 * k1[1] + A32 * k2[1]),
        ];
        let k3 = f(r + C[2] * h, &y3);
        let y4 = [
            y[0] + h * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
            y[1] + h * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]),
        ];
        let k4 = f(r + C[3] * h, &y4);
        let y5 = [
            y[0] + h * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
            y[1] + h * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1]),
        ];
        let k5 = f(r + C[4] * h, &y5);
        let y6 = [
            y[0] + h * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]),
            y[1] + h * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1]),
        ];
        let k6 = f(r + C[5] * h, &y6);
        let ynew = [
            y[0] + h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0]),
            y[1] + h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1]),
        ];
        let k7 = f(r + C[6] * h, &ynew);
        let err = [
            h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
            h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
        ];
        let scale0 = tol * (1.0 + y[0].abs());
        let scale1 = tol * (1.0 + y[1].abs());
        let e = ((err[0] / scale0).powi(2) + (err[1] / scale1).powi(2)).sqrt()
            / std::f64::consts::SQRT_2;
        if e <= 1.0 {
            r += h;
            *y = ynew;
            nodes.push(Node { r, u: y[0], du: y[1] });
        }
        let factor = if e > 0.0 { 0.9 * e.powf(-0.2) } else { 5.0 };
        h = (h * factor.clamp(0.2, 5.0)).min(h_max);
        if h < 1e-13 * span {
            return Err(Error::NoConvergence(format!(
                "step size underflow near r = {r:.6e}; the profile is too stiff at this tolerance"
            )));
        }
    }
    Ok(())
}

/// The solved zero-energy scattering problem.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    /// Scattering length from the exterior affine fit `u = α (r - a)`.
    pub scattering_length: f64,
    /// Variational energy `∫ |∇f|² + (1/2) w |f|²` over R³ (equals `4π a`).
    pub variational_energy: f64,
    /// `∫ w f` over R³ (equals `8π a`).
    pub g_integral: f64,
    support_radius: f64,
    r_max: f64,
    /// Interior nodes `(r, f, f')` on `[0, R_w]`.
    nodes: Vec<(f64, f64, f64)>,
    potential: RadialPotential,
}

impl ScatteringSolution {
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn potential(&self) -> &RadialPotential {
        &self.potential
    }

    /// `f(r)`: cubic Hermite through the interior nodes, exact `1 - a/r`
    /// outside the potential support.
    pub fn f(&self, r: f64) -> f64 {
        if r >= self.support_radius {
            return 1.0 - self.scattering_length / r.max(1e-300);
        }
        self.hermite(r).0
    }

    /// `f'(r)`, same representation.
    pub fn f_prime(&self, r: f64) -> f64 {
        if r >= self.support_radius {
            return self.scattering_length / (r * r).max(1e-300);
        }
        self.hermite(r).1
    }

    fn hermite(&self, r: f64) -> (f64, f64) {
        let nodes = &self.nodes;
        if nodes.is_empty() {
            return (1.0, 0.0);
        }
        if r <= nodes[0].0 {
            return (nodes[0].1, nodes[0].2);
        }
        let last = nodes.len() - 1;
        if r >= nodes[last].0 {
            return (nodes[last].1, nodes[last].2);
        }
        let mut lo = 0usize;
        let mut hi = last;
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

    /// Interior quadrature `4π ∫_0^{R_w} (f'² + (1/2) w f²) r² dr`.
    fn interior_energy(&self) -> f64 {
        let n = 40_000usize;
        let h = self.support_radius / n as f64;
        let integrand = |r: f64| {
            let fp = self.f_prime(r);
            let fv = self.f(r);
            (fp * fp + 0.5 * self.potential.eval(r) * fv * fv) * r * r
        };
        let mut acc = 0.0;
        for i in 0..n {
            acc += h * integrand((i as f64 + 0.5) * h);
        }
        4.0 * std::f64::consts::PI * acc
    }
}

/// Solve the scattering problem out to `r_max > R_w`.
pub fn solve_scattering(w: &RadialPotential, r_max: f64, tol: f64) -> Result<ScatteringSolution> {
    let rw = w.support_radius();
    if r_max <= rw {
        return Err(Error::invalid("r_max must exceed the potential support radius"));
    }
    if w.is_zero() {
        return Ok(ScatteringSolution {
            scattering_length: 0.0,
            variational_energy: 0.0,
            g_integral: 0.0,
            support_radius: rw,
            r_max,
            nodes: vec![(0.0, 1.0, 0.0), (rw, 1.0, 0.0)],
            potential: w.clone(),
        });
    }
    // u(0) = 0, u'(0) = 1; u ∝ r near the origin so the equation is regular
    let mut y = [0.0f64, 1.0];
    let mut raw = vec![Node { r: 0.0, u: 0.0, du: 1.0 }];
    // cap the interior step so the Hermite spline has dense nodes
    integrate_radial(w, 0.0, rw, &mut y, tol, rw / 512.0, &mut raw)?;
    let mut exterior = vec![Node { r: rw, u: y[0], du: y[1] }];
    integrate_radial(w, rw, r_max, &mut y, tol, (r_max - rw) / 16.0, &mut exterior)?;
    // exterior least-squares fit u = α r + β; averaging beats a point read
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    for node in &exterior {
        sx += node.r;
        sy += node.u;
        sxx += node.r * node.r;
        sxy += node.r * node.u;
        m += 1.0;
    }
    let denom = m * sxx - sx * sx;
    let (alpha, beta) = if denom.abs() > 1e-300 && exterior.len() > 1 {
        ((m * sxy - sx * sy) / denom, (sy * sxx - sx * sxy) / denom)
    } else {
        (exterior[0].du, exterior[0].u - exterior[0].du * exterior[0].r)
    };
    if alpha.abs() < 1e-300 {
        return Err(Error::NoConvergence("degenerate exterior slope".into()));
    }
    let a = -beta / alpha;
    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(raw.len() + 1);
    for node in &raw {
        if node.r <= 0.0 {
            nodes.push((0.0, node.du / alpha, 0.0));
        } else {
            let f = node.u / (alpha * node.r);
            let fp = (node.du * node.r - node.u) / (alpha * node.r * node.r);
            nodes.push((node.r, f, fp));
        }
    }
    // pin the boundary node to the exact exterior values
    nodes.push((rw, 1.0 - a / rw, a / (rw * rw)));
    let mut solution = ScatteringSolution {
        scattering_length: a,
        variational_energy: 0.0,
        g_integral: 0.0,
        support_radius: rw,
        r_max,
        nodes,
        potential: w.clone(),
    };
    let interior = solution.interior_energy();
    // exterior tail of |∇f|²: ∫_{R_w}^∞ a²/r² dr = a²/R_w
    solution.variational_energy = interior + 4.0 * std::f64::consts::PI * a * a / rw;
    let n = 40_000usize;
    let h = rw / n as f64;
    let mut acc = 0.0;
    let integrand = |r: f64| w.eval(r) * solution.f(r) * r * r;
    for i in 0..n {
        acc += h * integrand((i as f64 + 0.5) * h);
    }
    solution.g_integral = 4.0 * std::f64::consts::PI * acc;
    Ok(solution)
}

/// Dirichlet scattering energy on the ball of radius `R`.
#[derive(Debug, Clone)]
pub struct BallEnergy {
    /// Closed form `4π a (1 - a/R)^{-1}`.
    pub closed_form: f64,
    /// Quadrature of the minimizer `f_R = f / f(R)`.
    pub quadrature: f64,
    /// `f_R` samples `(r, f_R(r))` on a uniform grid including both ends.
    pub f_samples: Vec<(f64, f64)>,
}

/// Energy and minimizer of the ball-restricted scattering problem,
/// `f_R(x) = f(x)/f(R)` so that `f_R(R) = 1`.
pub fn scattering_energy_ball(solution: &ScatteringSolution, radius: f64) -> Result<BallEnergy> {
    if radius <= solution.support_radius() {
        return Err(Error::invalid("ball radius must exceed the potential support"));
    }
    let a = solution.scattering_length;
    let f_r = 1.0 - a / radius;
    let closed_form = 4.0 * std::f64::consts::PI * a / f_r;
    let w = solution.potential();
    let integrand = |r: f64| {
        let fp = solution.f_prime(r) / f_r;
        let fv = solution.f(r) / f_r;
        (fp * fp + 0.5 * w.eval(r) * fv * fv) * r * r
    };
    let acc = segmented_midpoint(&integrand, 0.0, radius, &[solution.support_radius()], 40_000);
    let quadrature = 4.0 * std::f64::consts::PI * acc;
    let samples: Vec<(f64, f64)> = (0..=200)
        .map(|i| {
            let r = radius * i as f64 / 200.0;
            (r, solution.f(r) / f_r)
        })
        .collect();
    Ok(BallEnergy { closed_form, quadrature, f_samples: samples })
}

/// Born expansion partial sums for the scattering length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BornSeries {
    /// `S_K`: alternating partial sums, `S_1 = (8π)^{-1} ∫ w_N`.
    pub partial_sums: Vec<f64>,
    /// Magnitudes of the successive corrections `(8π)^{-1} ∫ L^{k-1}(w_N)`.
    pub terms: Vec<f64>,
    pub beta: f64,
    pub n: usize,
}

/// Born series via iterated application of
/// `L(g)(x) = (8π)^{-1} w_N(x) ∫ |x-y|^{-1} g(y) dy` in radial quadrature.
///
/// The exact expansion alternates: `8π a = ∫w - ∫L w + ∫L² w - ...`; the
/// `k`-th term has relative size `N^{(β-1)(k-1)}` against the first one.
pub fn born_series(w: &RadialPotential, n: usize, beta: f64, orders: usize) -> Result<BornSeries> {
    if orders < 1 {
        return Err(Error::invalid("need at least one Born order"));
    }
    if beta >= 1.0 {
        return Err(Error::invalid("the Born expansion needs beta < 1"));
    }
    let wn = scale_potential(w, n, beta, 3, PotentialScaling::FullStrength)?;
    let rw = wn.support_radius();
    let m = 8192usize;
    let h = rw / m as f64;
    // cell midpoints: robust against the jump at the support edge
    let rs: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * h).collect();
    let mut g: Vec<f64> = rs.iter().map(|&r| wn.eval(r)).collect();
    let eight_pi = 8.0 * std::f64::consts::PI;
    let volume_integral = |g: &[f64]| -> f64 {
        let acc: f64 = (0..m).map(|i| h * g[i] * rs[i] * rs[i]).sum();
        4.0 * std::f64::consts::PI * acc
    };
    let mut terms = vec![volume_integral(&g) / eight_pi];
    for _ in 1..orders {
        // Newtonian potential of a radial g:
        // ∫ |x-y|^{-1} g = 4π [ (1/r) ∫_0^r g s² ds + ∫_r^R g s ds ]
        // prefix sums at cell boundaries, then half cells to the midpoints
        let mut inner_b = vec![0.0f64; m + 1];
        let mut outer_b = vec![0.0f64; m + 1];
        for i in 0..m {
            inner_b[i + 1] = inner_b[i] + h * g[i] * rs[i] * rs[i];
        }
        for i in (0..m).rev() {
            outer_b[i] = outer_b[i + 1] + h * g[i] * rs[i];
        }
        let mut next = vec![0.0f64; m];
        for i in 0..m {
            let inner = inner_b[i] + 0.5 * h * g[i] * rs[i] * rs[i];
            let outer = outer_b[i + 1] + 0.5 * h * g[i] * rs[i];
            let newton = 4.0 * std::f64::consts::PI * (inner / rs[i] + outer);
            next[i] = wn.eval(rs[i]) / eight_pi * newton;
        }
        g = next;
        terms.push(volume_integral(&g) / eight_pi);
    }
    let mut partial_sums = Vec::with_capacity(orders);
    let mut acc = 0.0;
    for (k, &t) in terms.iter().enumerate() {
        acc += if k % 2 == 0 { t } else { -t };
        partial_sums.push(acc);
    }
    Ok(BornSeries { partial_sums, terms, beta, n })
}

/// Annular constant Dyson replacement potential on `[inner, outer]`,
/// normalized so `∫ U(r) r² dr` equals the scattering length.
#[derive(Debug, Clone, Copy)]
pub struct DysonPotential {
    pub inner: f64,
    pub outer: f64,
    pub height: f64,
}

impl DysonPotential {
    pub fn annular(inner: f64, outer: f64, scattering_length: f64) -> Result<Self> {
        if !(outer > inner && inner >= 0.0) {
            return Err(Error::invalid("need 0 <= inner < outer"));
        }
        let height = 3.0 * scattering_length / (outer.powi(3) - inner.powi(3));
        Ok(DysonPotential { inner, outer, height })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.inner && r <= self.outer {
            self.height
        } else {
            0.0
        }
    }
}

/// Both sides of Dyson's lemma for a radial test function `f` (given with
/// its derivative) on the ball of radius `domain_radius`:
/// `∫ (|∇f|² + (1/2) w |f|²) >= ∫ U |f|²`.
pub fn dyson_transform(
    w: &RadialPotential,
    u: &DysonPotential,
    f: &dyn Fn(f64) -> (f64, f64),
    domain_radius: f64,
) -> Result<(f64, f64)> {
    if u.inner < w.support_radius() {
        return Err(Error::invalid(
            "the Dyson potential support must be disjoint from the interaction support",
        ));
    }
    if domain_radius <= 0.0 {
        return Err(Error::invalid("domain radius must be positive"));
    }
    let breaks = [w.support_radius(), u.inner, u.outer];
    let lhs_f = |r: f64| {
        let (fv, fp) = f(r);
        (fp * fp + 0.5 * w.eval(r) * fv * fv) * r * r
    };
    let rhs_f = |r: f64| {
        let (fv, _) = f(r);
        u.eval(r) * fv * fv * r * r
    };
    let lhs = segmented_midpoint(&lhs_f, 0.0, domain_radius, &breaks, 60_000);
    let rhs = segmented_midpoint(&rhs_f, 0.0, domain_radius, &breaks, 60_000);
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok((four_pi * lhs, four_pi * rhs))
}

// ---------------------------------------------------------------------------
// Onsager's inequality

/// Even potential with certified non-negative Fourier transform.
#[derive(Debug, Clone)]
pub enum OnsagerPotential {
    /// `amp * exp(-|x|²/(2σ²))`, `amp >= 0`: Gaussian/heat-kernel preset.
    Gaussian { amp: f64, sigma: f64 },
    /// Non-negative mixture of Gaussians.
    Mixture(Vec<(f64, f64)>),
}

impl OnsagerPotential {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            OnsagerPotential::Gaussian { amp, sigma } => *amp >= 0.0 && *sigma > 0.0,
            OnsagerPotential::Mixture(parts) => {
                !parts.is_empty() && parts.iter().all(|&(a, s)| a >= 0.0 && s > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "potential without a certified non-negative Fourier transform",
            ))
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|&c| c * c).sum();
        match self {
            OnsagerPotential::Gaussian { amp, sigma } => amp * (-r2 / (2.0 * sigma * sigma)).exp(),
            OnsagerPotential::Mixture(parts) => {
                parts.iter().map(|&(a, s)| a * (-r2 / (2.0 * s * s)).exp()).sum()
            }
        }
    }

    pub fn at_zero(&self) -> f64 {
        match self {
            OnsagerPotential::Gaussian { amp, .. } => *amp,
            OnsagerPotential::Mixture(parts) => parts.iter().map(|&(a, _)| a).sum(),
        }
    }
}

/// A non-negative density as a discrete measure: weighted points in R^d.
///
/// The inequality is exact for point masses, so discretizing the density
/// this way keeps the check rigorous up to float roundoff.
#[derive(Debug, Clone)]
pub struct DensityMeasure {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl DensityMeasure {
    /// Gaussian density sampled on a centered cubic grid, total mass fixed.
    pub fn gaussian_on_grid(
        dim: usize,
        center: &[f64],
        sigma: f64,
        half_width: f64,
        per_axis: usize,
        mass: f64,
    ) -> Self {
        let h = 2.0 * half_width / per_axis as f64;
        let axis: Vec<f64> = (0..per_axis).map(|i| -half_width + (i as f64 + 0.5) * h).collect();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let total_cells = per_axis.pow(dim as u32);
        for cell in 0..total_cells {
            let mut rem = cell;
            let mut p = vec![0.0f64; dim];
            let mut r2 = 0.0;
            for a in 0..dim {
                let off = axis[rem % per_axis];
                rem /= per_axis;
                p[a] = center[a] + off;
                r2 += off * off;
            }
            points.push(p);
            weights.push((-r2 / (2.0 * sigma * sigma)).exp());
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w *= mass / total;
        }
        DensityMeasure { points, weights }
    }
}

/// `LHS - RHS` of Onsager's inequality:
/// `sum_{i<j} w(x_i-x_j) - [ sum_j (w*ρ)(x_j) - (1/2) ∬ ρ w ρ - (N/2) w(0) ]`.
///
/// Non-negative whenever the Fourier transform of `w` is non-negative.
pub fn onsager_gap(
    positions: &[Vec<f64>],
    w: &OnsagerPotential,
    rho: &DensityMeasure,
) -> Result<f64> {
    w.validate()?;
    let n = positions.len();
    if n == 0 {
        return Err(Error::invalid("need at least one particle"));
    }
    let dim = positions[0].len();
    if positions.iter().any(|p| p.len() != dim) || rho.points.iter().any(|p| p.len() != dim) {
        return Err(Error::dim("inconsistent coordinate dimensions"));
    }
    let mut scratch = vec![0.0f64; dim];
    let mut eval_diff = |a: &[f64], b: &[f64]| -> f64 {
        for ((s, &x), &y) in scratch.iter_mut().zip(a.iter()).zip(b.iter()) {
            *s = x - y;
        }
        w.eval(&scratch)
    };
    let mut lhs = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            lhs += eval_diff(&positions[i], &positions[j]);
        }
    }
    let mut convolution_sum = 0.0f64;
    for p in positions {
        for (q, &mass) in rho.points.iter().zip(rho.weights.iter()) {
            convolution_sum += mass * eval_diff(p, q);
        }
    }
    let mut rho_w_rho = 0.0f64;
    for (ia, (qa, &ma)) in rho.points.iter().zip(rho.weights.iter()).enumerate() {
        rho_w_rho += ma * ma * w.at_zero();
        for (qb, &mb) in rho.points.iter().zip(rho.weights.iter()).skip(ia + 1) {
            rho_w_rho += 2.0 * ma * mb * eval_diff(qa, qb);
        }
    }
    let rhs = convolution_sum - 0.5 * rho_w_rho - 0.5 * n as f64 * w.at_zero();
    Ok(lhs - rhs)
}

/// JSON report for a solved potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub a: f64,
    pub e_variational: f64,
    pub g_integral: f64,
    pub born: Vec<f64>,
}

impl ScatteringReport {
    pub fn new(solution: &ScatteringSolution, born: Option<&BornSeries>) -> Self {
        ScatteringReport {
            a: solution.scattering_length,
            e_variational: solution.variational_energy,
            g_integral: solution.g_integral,
            born: born.map(|b| b.partial_sums.clone()).unwrap_or_default(),
        }
    }
}

#[cfg(test)]
mod tests;
