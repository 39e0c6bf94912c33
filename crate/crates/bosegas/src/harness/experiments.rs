//! Experiment runners: scaling sweeps, condensation witnesses, scattering
//! reports, de Finetti sweeps, Bogoliubov and VMC suites, inequality sweeps.
//!
//! Every runner is a pure function of (config, seed). Failing rows are
//! recorded in the table and never abort a sweep.

use super::config::{DefinettiFamily, ExperimentKind, HarnessConfig};
use super::table::{linear_fit, Column, Provenance, ResultTable, Value};
use crate::bogoliubov::{
    bogoliubov_brute_force, bogoliubov_ground_energy, bogoliubov_lower_bound,
    QuadraticHamiltonian,
};
use crate::definetti::{definetti_error, SamplingStrategy, SectorState, SphereSampler};
use crate::fock::{condensate_coefficients, OccupationBasis};
use crate::linalg::{eigh, eigh_real, trace_norm_hermitian};
use crate::manybody::{
    assemble_hamiltonian, condensate_fraction, ground_state, hartree_minimum,
    hoffmann_ostenhof_gap, reduced_density_matrix, OneBodyMatrix, ScalingSpec, TwoBodyTensor,
};
use crate::meanfield::{
    minimize, Boundary, GaugePreset, Grid, MeanFieldProblem, MinimizerInit, PotentialPreset,
};
use crate::scattering::{
    born_series, dyson_transform, onsager_gap, scale_potential, scattering_energy_ball,
    solve_scattering, DensityMeasure, DysonPotential, OnsagerPotential, PotentialScaling,
    RadialPotential,
};
use crate::trialstates::{
    exact_two_body_energy, vmc_energy, CorrelatedTrialState, Domain, KineticEstimator,
    OneBodyFactor, PairProfile, TrapKind, TrialHamiltonian, VmcConfig,
};
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// The canonical two-mode toy model: `h = diag(0, 1)`, `w_1111 = 2`.
///
/// Its per-pair-scaled spectrum is diagonal in the occupation basis, so the
/// ground energy has the closed form `E(N)/N = 3/4 - 1/(4(N-1))` at even N
/// while the Hartree minimum is exactly 3/4.
pub fn toy_two_mode_model() -> (OneBodyMatrix, TwoBodyTensor) {
    let h = OneBodyMatrix::diagonal(&[0.0, 1.0]);
    let w = TwoBodyTensor::from_terms(2, vec![((0, 0, 0, 0), Complex64::new(2.0, 0.0))])
        .expect("valid toy tensor");
    (h, w)
}

/// Provenance stamp for runs assembled in code rather than from a file.
pub fn standalone_provenance(tag: &str, seed: u64) -> Provenance {
    Provenance {
        config_hash: super::table::fnv1a_hex(tag.as_bytes()),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Outcome of one experiment: the table plus its pass/fail verdict.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub name: String,
    pub table: ResultTable,
    pub passed: bool,
    pub summary: String,
}

/// Run every experiment of a configuration with a fixed seed.
pub fn run_all(config: &HarnessConfig, base: &Path, seed: u64) -> Result<Vec<ExperimentOutcome>> {
    config.validate(base)?;
    let provenance = Provenance {
        config_hash: config.hash(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut outcomes = Vec::with_capacity(config.experiments.len());
    for exp in &config.experiments {
        let outcome = run_experiment(config, base, &exp.kind, &exp.name, seed, &provenance)?;
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

pub fn run_experiment(
    config: &HarnessConfig,
    base: &Path,
    kind: &ExperimentKind,
    name: &str,
    seed: u64,
    provenance: &Provenance,
) -> Result<ExperimentOutcome> {
    match kind {
        ExperimentKind::ScalingSweep { model, n_list, tol } => {
            let file = &config.models[model];
            let (h, w) = file.to_operators()?;
            Ok(run_scaling_sweep(&h, &w, n_list, *tol, name, provenance))
        }
        ExperimentKind::Condensation { model, n_list, orders } => {
            let file = &config.models[model];
            let (h, w) = file.to_operators()?;
            Ok(run_condensation(&h, &w, n_list, orders, name, provenance))
        }
        ExperimentKind::ScatteringReport { potential, ball_radii, born } => {
            let w = potential.build(base)?;
            Ok(run_scattering_report(&w, ball_radii, born.as_ref(), name, provenance))
        }
        ExperimentKind::DefinettiSweep { d, k, n_list, samples, family } => Ok(
            run_definetti_sweep(*d, *k, n_list, *samples, family, seed, name, provenance),
        ),
        ExperimentKind::BogoliubovSuite { instances, cap } => {
            Ok(run_bogoliubov_suite(*instances, *cap, seed, name, provenance))
        }
        ExperimentKind::VmcSuite {
            particles,
            box_length,
            potential,
            cutoff,
            walkers,
            steps,
            burn_in,
        } => {
            let w = potential.build(base)?;
            run_vmc_suite(
                *particles,
                *box_length,
                &w,
                *cutoff,
                *walkers,
                *steps,
                *burn_in,
                seed,
                name,
                provenance,
            )
        }
        ExperimentKind::InequalitySuite { onsager, hoffmann_ostenhof, dyson } => Ok(
            run_inequality_suite(*onsager, *hoffmann_ostenhof, *dyson, seed, name, provenance),
        ),
        ExperimentKind::GpMinimize { grid_points, scattering_length, tol } => {
            Ok(run_gp_minimize(*grid_points, *scattering_length, *tol, seed, name, provenance))
        }
    }
}

/// Born-series sweep spec inside a scattering report.
pub use super::config::BornSpec;

// ---------------------------------------------------------------------------

pub fn run_scaling_sweep(
    h: &OneBodyMatrix,
    w: &TwoBodyTensor,
    n_list: &[usize],
    tol: f64,
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    let schema = vec![
        Column::new("n", ""),
        Column::new("e_per_particle", "energy"),
        Column::new("e_mean_field", "energy"),
        Column::new("gap", "energy"),
        Column::new("condensate_fraction", ""),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let (e_mf, _u_mf) = hartree_minimum(h, w);
    let mut all_ok = true;
    for &n in n_list {
        let row = (|| -> Result<Vec<Value>> {
            let ham = assemble_hamiltonian(h, w, n, ScalingSpec::mean_field())?;
            let gs = ground_state(&ham, tol)?;
            let per = gs.energy / n as f64;
            let rdm = reduced_density_matrix(ham.basis(), &gs.vector, 1)?;
            let (fraction, _) = condensate_fraction(&rdm, n)?;
            Ok(vec![
                Value::Int(n as i64),
                Value::Float(per),
                Value::Float(e_mf),
                Value::Float(e_mf - per),
                Value::Float(fraction),
                Value::Text("ok".into()),
            ])
        })();
        match row {
            Ok(r) => table.push(r),
            Err(e) => {
                all_ok = false;
                table.push(vec![
                    Value::Int(n as i64),
                    Value::Float(f64::NAN),
                    Value::Float(e_mf),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Text(format!("error: {e}")),
                ]);
            }
        }
    }
    let summary = match gap_fit(&table) {
        Some((slope, r2)) => format!("E_MF = {e_mf:.9}; gap slope {slope:.3} (R² {r2:.3})"),
        None => format!("E_MF = {e_mf:.9}"),
    };
    ExperimentOutcome { name: name.into(), table, passed: all_ok, summary }
}

/// Log-log fit of the gap column against N.
pub fn gap_fit(table: &ResultTable) -> Option<(f64, f64)> {
    let ns = table.numeric_column("n");
    let gaps = table.numeric_column("gap");
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(gaps.iter())
        .filter(|(_, &g)| g.is_finite() && g > 0.0)
        .map(|(&n, &g)| (n.ln(), g.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    Some(linear_fit(&pts))
}

// ---------------------------------------------------------------------------

/// Modes whose particle number commutes with the model: the condensation
/// target is then the phase average of the Hartree projector over those
/// modes: the convex combination over the minimizer orbit that the
/// fragmented ground state actually converges to.
fn conserved_modes(h: &OneBodyMatrix, w: &TwoBodyTensor) -> Vec<bool> {
    let d = h.dim();
    let mut conserved = vec![true; d];
    for m in 0..d {
        for k in 0..d {
            if m != k
                && (h.entries()[(m, k)].norm() > 1e-14 || h.entries()[(k, m)].norm() > 1e-14)
            {
                conserved[m] = false;
            }
        }
    }
    for ((i, j, k, l), v) in w.terms() {
        if v.norm() == 0.0 {
            continue;
        }
        for (m, flag) in conserved.iter_mut().enumerate() {
            let created = (i == m) as i32 + (j == m) as i32;
            let destroyed = (k == m) as i32 + (l == m) as i32;
            if created != destroyed {
                *flag = false;
            }
        }
    }
    conserved
}

/// Phase-averaged projector `avg_φ |u_φ^{⊗k}><u_φ^{⊗k}|` over the conserved
/// mode phases; the plain projector when nothing is conserved.
fn condensation_target(
    u: &DVector<Complex64>,
    k: usize,
    conserved: &[bool],
) -> Result<DMatrix<Complex64>> {
    let d = u.len();
    let sector = OccupationBasis::new(k, d)?;
    let c = condensate_coefficients(&sector, u);
    let mut t = DMatrix::<Complex64>::zeros(sector.len(), sector.len());
    for r in 0..sector.len() {
        for s in 0..sector.len() {
            let keep = (0..d).all(|m| !conserved[m] || sector.state(r)[m] == sector.state(s)[m]);
            if keep {
                t[(r, s)] = c[r] * c[s].conj();
            }
        }
    }
    Ok(t)
}

pub fn run_condensation(
    h: &OneBodyMatrix,
    w: &TwoBodyTensor,
    n_list: &[usize],
    orders: &[usize],
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    let schema = vec![
        Column::new("n", ""),
        Column::new("k", ""),
        Column::new("trace_distance", ""),
        Column::new("top_eigenvalue", ""),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let (_, u_mf) = hartree_minimum(h, w);
    let conserved = conserved_modes(h, w);
    let mut all_ok = true;
    for &n in n_list {
        for &k in orders {
            let row = (|| -> Result<Vec<Value>> {
                let ham = assemble_hamiltonian(h, w, n, ScalingSpec::mean_field())?;
                let gs = ground_state(&ham, 1e-10)?;
                let rdm = reduced_density_matrix(ham.basis(), &gs.vector, k)?;
                let normalized =
                    &rdm.matrix / Complex64::new(crate::manybody::binomial_f64(n, k), 0.0);
                let target = condensation_target(&u_mf, k, &conserved)?;
                let distance = trace_norm_hermitian(&(&normalized - &target));
                let (eigs, _) = eigh(&normalized);
                Ok(vec![
                    Value::Int(n as i64),
                    Value::Int(k as i64),
                    Value::Float(distance),
                    Value::Float(*eigs.last().unwrap()),
                    Value::Text("ok".into()),
                ])
            })();
            match row {
                Ok(r) => table.push(r),
                Err(e) => {
                    all_ok = false;
                    table.push(vec![
                        Value::Int(n as i64),
                        Value::Int(k as i64),
                        Value::Float(f64::NAN),
                        Value::Float(f64::NAN),
                        Value::Text(format!("error: {e}")),
                    ]);
                }
            }
        }
    }
    ExperimentOutcome {
        name: name.into(),
        table,
        passed: all_ok,
        summary: "condensation distances computed".into(),
    }
}

// ---------------------------------------------------------------------------

pub fn run_scattering_report(
    w: &RadialPotential,
    ball_radii: &[f64],
    born: Option<&BornSpec>,
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    let schema = vec![
        Column::new("quantity", ""),
        Column::new("value", ""),
        Column::new("reference", ""),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let mut passed = true;
    let push = |table: &mut ResultTable, q: &str, v: f64, r: f64, ok: bool| {
        table.push(vec![
            Value::Text(q.into()),
            Value::Float(v),
            Value::Float(r),
            Value::Text(if ok { "ok".into() } else { "violated".to_string() }),
        ]);
    };
    match solve_scattering(w, 4.0 * w.support_radius(), 1e-12) {
        Err(e) => {
            passed = false;
            table.push(vec![
                Value::Text("solve".into()),
                Value::Float(f64::NAN),
                Value::Float(f64::NAN),
                Value::Text(format!("error: {e}")),
            ]);
        }
        Ok(solution) => {
            let a = solution.scattering_length;
            let four_pi = 4.0 * std::f64::consts::PI;
            let ok_var = (solution.variational_energy - four_pi * a).abs() <= 1e-6;
            passed &= ok_var;
            push(&mut table, "scattering_length", a, a, true);
            push(&mut table, "variational_energy", solution.variational_energy, four_pi * a, ok_var);
            let ok_g = (solution.g_integral - 2.0 * four_pi * a).abs() <= 1e-6;
            passed &= ok_g;
            push(&mut table, "g_integral", solution.g_integral, 2.0 * four_pi * a, ok_g);
            let born_first = w.integral_3d() / (2.0 * four_pi);
            let strict = a < born_first;
            passed &= strict || w.is_zero();
            push(&mut table, "first_born_term", born_first, a, strict || w.is_zero());
            for &radius in ball_radii {
                match scattering_energy_ball(&solution, radius) {
                    Ok(ball) => {
                        let ok = (ball.quadrature - ball.closed_form).abs() <= 1e-6;
                        passed &= ok;
                        push(
                            &mut table,
                            &format!("ball_energy_r_{radius}"),
                            ball.quadrature,
                            ball.closed_form,
                            ok,
                        );
                    }
                    Err(e) => {
                        passed = false;
                        table.push(vec![
                            Value::Text(format!("ball_energy_r_{radius}")),
                            Value::Float(f64::NAN),
                            Value::Float(f64::NAN),
                            Value::Text(format!("error: {e}")),
                        ]);
                    }
                }
            }
            if let Some(spec) = born {
                let mut pts = Vec::new();
                for &n in &spec.n_list {
                    match born_series(w, n, spec.beta, spec.orders) {
                        Ok(series) => {
                            let wn = scale_potential(w, n, spec.beta, 3, PotentialScaling::FullStrength)
                                .and_then(|wn| {
                                    solve_scattering(&wn, 4.0 * wn.support_radius(), 1e-12)
                                });
                            match wn {
                                Ok(sol_n) => {
                                    let ode = sol_n.scattering_length;
                                    let rel = ((series.partial_sums[0] - ode) / ode).abs();
                                    pts.push(((n as f64).ln(), rel.ln()));
                                    push(
                                        &mut table,
                                        &format!("born_rel_error_n_{n}"),
                                        rel,
                                        (n as f64).powf(spec.beta - 1.0),
                                        true,
                                    );
                                }
                                Err(e) => {
                                    passed = false;
                                    table.push(vec![
                                        Value::Text(format!("born_n_{n}")),
                                        Value::Float(f64::NAN),
                                        Value::Float(f64::NAN),
                                        Value::Text(format!("error: {e}")),
                                    ]);
                                }
                            }
                        }
                        Err(e) => {
                            passed = false;
                            table.push(vec![
                                Value::Text(format!("born_n_{n}")),
                                Value::Float(f64::NAN),
                                Value::Float(f64::NAN),
                                Value::Text(format!("error: {e}")),
                            ]);
                        }
                    }
                }
                if pts.len() >= 2 {
                    let (slope, r2) = linear_fit(&pts);
                    let ok = (slope - (spec.beta - 1.0)).abs() <= 0.15;
                    passed &= ok;
                    push(&mut table, "born_decay_slope", slope, spec.beta - 1.0, ok);
                    push(&mut table, "born_decay_r2", r2, 1.0, true);
                }
            }
        }
    }
    ExperimentOutcome {
        name: name.into(),
        table,
        passed,
        summary: "scattering identities checked".into(),
    }
}

// ---------------------------------------------------------------------------

fn haar_vector(d: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    let mut v = DVector::<Complex64>::zeros(d);
    for z in v.iter_mut() {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        *z = Complex64::new(r * th.cos(), r * th.sin());
    }
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

#[allow(clippy::too_many_arguments)]
pub fn run_definetti_sweep(
    d: usize,
    k: usize,
    n_list: &[usize],
    samples: usize,
    family: &DefinettiFamily,
    seed: u64,
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    let schema = vec![
        Column::new("n", ""),
        Column::new("distance", ""),
        Column::new("mc_sigma", ""),
        Column::new("fitted_constant", ""),
        Column::new("closed_form", ""),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xDEF1);
    // family components fixed across the N sweep
    let components: Vec<(f64, DVector<Complex64>)> = match family {
        DefinettiFamily::Condensate => vec![(1.0, haar_vector(d, &mut rng))],
        DefinettiFamily::MixedCondensates { components } => {
            let m = (*components).max(1);
            let mut weights: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.2).collect();
            let total: f64 = weights.iter().sum();
            for w in weights.iter_mut() {
                *w /= total;
            }
            weights
                .into_iter()
                .map(|w| (w, haar_vector(d, &mut rng)))
                .collect()
        }
    };
    let mut all_ok = true;
    let mut pts = Vec::new();
    for &n in n_list {
        let row = (|| -> Result<Vec<Value>> {
            let basis = OccupationBasis::new(n, d)?;
            let state = if components.len() == 1 {
                SectorState::Pure(condensate_coefficients(&basis, &components[0].1))
            } else {
                let dim = basis.len();
                let mut gamma = DMatrix::<Complex64>::zeros(dim, dim);
                for (p, u) in &components {
                    let c = condensate_coefficients(&basis, u);
                    gamma += (&c * c.adjoint()) * Complex64::new(*p, 0.0);
                }
                SectorState::Mixed(gamma)
            };
            let strategy = SamplingStrategy::Tilted { components: components.clone() };
            let sampler = SphereSampler::new(d, seed ^ (n as u64) << 8, samples);
            let err = definetti_error(&state, &basis, k, &sampler, &strategy)?;
            let closed = if components.len() == 1 && k == 1 {
                2.0 * (d as f64 - 1.0) / (n as f64 + d as f64)
            } else {
                f64::NAN
            };
            Ok(vec![
                Value::Int(n as i64),
                Value::Float(err.trace_distance),
                Value::Float(err.mc_sigma),
                Value::Float(err.fitted_constant),
                Value::Float(closed),
                Value::Text("ok".into()),
            ])
        })();
        match row {
            Ok(r) => {
                if let (Some(nv), Some(dv)) = (r[0].as_f64(), r[1].as_f64()) {
                    if dv > 0.0 {
                        pts.push((nv.ln(), dv.ln()));
                    }
                }
                table.push(r);
            }
            Err(e) => {
                all_ok = false;
                table.push(vec![
                    Value::Int(n as i64),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Text(format!("error: {e}")),
                ]);
            }
        }
    }
    let summary = if pts.len() >= 2 {
        let (slope, r2) = linear_fit(&pts);
        format!("distance slope {slope:.3} (R² {r2:.3})")
    } else {
        "sweep too short for a fit".into()
    };
    ExperimentOutcome { name: name.into(), table, passed: all_ok, summary }
}

// ---------------------------------------------------------------------------

/// Deterministic generator of valid (H, K) instances.
pub fn random_quadratic_instance(d: usize, seed: u64) -> QuadraticHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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
        let t = if d > 1 {
            (eigs[i] - eigs[0]) / (eigs[d - 1] - eigs[0]).max(1e-12)
        } else {
            0.5
        };
        diag[(i, i)] = 1.0 + 2.0 * t;
    }
    let h = &vecs * diag * vecs.transpose();
    let mut k = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = 0.25 * (rng.random::<f64>() - 0.5);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    QuadraticHamiltonian::new(h, k).expect("generator produces valid instances")
}

pub fn run_bogoliubov_suite(
    instances: usize,
    cap: usize,
    seed: u64,
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    let schema = vec![
        Column::new("instance", ""),
        Column::new("d", ""),
        Column::new("closed_form", "energy"),
        Column::new("oracle", "energy"),
        Column::new("difference", "energy"),
        Column::new("lower_bound", "energy"),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let mut passed = true;
    for i in 0..instances {
        let d = 1 + (i % 3);
        let qh = random_quadratic_instance(d, seed ^ ((i as u64) << 16));
        let row = (|| -> Result<Vec<Value>> {
            let closed = bogoliubov_ground_energy(&qh).ground_energy;
            let used_cap = if d == 3 { cap.min(24) } else { cap };
            let oracle = bogoliubov_brute_force(&qh, used_cap)?;
            let bound = bogoliubov_lower_bound(&qh)?;
            let diff = (closed - oracle.extrapolated).abs();
            let ok = diff <= 1e-6 * (1.0 + closed.abs()) && bound <= closed + 1e-12;
            Ok(vec![
                Value::Int(i as i64),
                Value::Int(d as i64),
                Value::Float(closed),
                Value::Float(oracle.extrapolated),
                Value::Float(diff),
                Value::Float(bound),
                Value::Text(if ok { "ok".into() } else { "violated".to_string() }),
            ])
        })();
        match row {
            Ok(r) => {
                if r.last().and_then(|v| v.as_text()) != Some("ok") {
                    passed = false;
                }
                table.push(r);
            }
            Err(e) => {
                passed = false;
                table.push(vec![
                    Value::Int(i as i64),
                    Value::Int(d as i64),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Float(f64::NAN),
                    Value::Text(format!("error: {e}")),
                ]);
            }
        }
    }
    ExperimentOutcome {
        name: name.into(),
        table,
        passed,
        summary: format!("{instances} diagonalization instances"),
    }
}

// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn run_vmc_suite(
    particles: usize,
    box_length: f64,
    w: &RadialPotential,
    cutoff: f64,
    walkers: usize,
    steps: usize,
    burn_in: usize,
    seed: u64,
    name: &str,
    provenance: &Provenance,
) -> Result<ExperimentOutcome> {
    let schema = vec![
        Column::new("case", ""),
        Column::new("energy_per_particle", "energy"),
        Column::new("std_error", "energy"),
        Column::new("reference", "energy"),
        Column::new("z_score", ""),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let mut passed = true;
    let domain = Domain::Torus3 { l: box_length };
    let wn = scale_potential(w, particles, 1.0, 3, PotentialScaling::FullStrength)?;
    let solution = solve_scattering(w, (cutoff * particles as f64).max(2.0) * 1.5, 1e-11)?;
    let profile = PairProfile::from_scattering(&solution, particles, cutoff)?;
    let hamiltonian =
        TrialHamiltonian { trap: TrapKind::Zero, pair_potential: Some(wn.clone()) };
    let cfg = VmcConfig {
        walkers,
        steps,
        burn_in,
        step_size: 0.4 * box_length.min(1.0),
        seed,
        estimator: KineticEstimator::GradientForm,
    };
    // 1. product state vs the quadrature Hartree energy
    let product = CorrelatedTrialState::product(OneBodyFactor::Uniform, domain);
    let hartree_ref = (particles as f64 - 1.0) / 2.0 * wn.integral_3d() / box_length.powi(3);
    let product_est = vmc_energy(&product, &hamiltonian, particles, &cfg)?;
    let z1 = (product_est.energy_per_particle - hartree_ref).abs() / product_est.std_error;
    passed &= z1 <= 3.0;
    table.push(vec![
        Value::Text("product_vs_hartree".into()),
        Value::Float(product_est.energy_per_particle),
        Value::Float(product_est.std_error),
        Value::Float(hartree_ref),
        Value::Float(z1),
        Value::Text(if z1 <= 3.0 { "ok".into() } else { "violated".to_string() }),
    ]);
    // 2. N = 2 Jastrow vs the deterministic relative-coordinate quadrature
    let jastrow =
        CorrelatedTrialState::jastrow(OneBodyFactor::Uniform, profile.clone(), domain)?;
    let two_body_w = scale_potential(w, particles, 1.0, 3, PotentialScaling::FullStrength)?;
    let two_body_h =
        TrialHamiltonian { trap: TrapKind::Zero, pair_potential: Some(two_body_w) };
    let oracle = exact_two_body_energy(&jastrow, &two_body_h, box_length)?;
    let two_cfg = VmcConfig { seed: seed ^ 0x2B0D, ..cfg.clone() };
    let pair_est = vmc_energy(&jastrow, &two_body_h, 2, &two_cfg)?;
    let z2 = (pair_est.energy_per_particle - oracle).abs() / pair_est.std_error;
    passed &= z2 <= 3.0;
    table.push(vec![
        Value::Text("n2_jastrow_vs_quadrature".into()),
        Value::Float(pair_est.energy_per_particle),
        Value::Float(pair_est.std_error),
        Value::Float(oracle),
        Value::Float(z2),
        Value::Text(if z2 <= 3.0 { "ok".into() } else { "violated".to_string() }),
    ]);
    // 3. Jastrow beats Product by at least 3 sigma
    let jas_cfg = VmcConfig { seed: seed ^ 0x1A57, ..cfg.clone() };
    let jastrow_est = vmc_energy(&jastrow, &hamiltonian, particles, &jas_cfg)?;
    let sigma = (jastrow_est.std_error.powi(2) + product_est.std_error.powi(2)).sqrt();
    let margin = (product_est.energy_per_particle - jastrow_est.energy_per_particle) / sigma;
    passed &= margin >= 3.0;
    table.push(vec![
        Value::Text("jastrow_below_product".into()),
        Value::Float(jastrow_est.energy_per_particle),
        Value::Float(jastrow_est.std_error),
        Value::Float(product_est.energy_per_particle),
        Value::Float(margin),
        Value::Text(if margin >= 3.0 { "ok".into() } else { "violated".to_string() }),
    ]);
    Ok(ExperimentOutcome {
        name: name.into(),
        table,
        passed,
        summary: "VMC comparisons finished".into(),
    })
}

// ---------------------------------------------------------------------------

pub fn run_inequality_suite(
    onsager: usize,
    hoffmann: usize,
    dyson: usize,
    seed: u64,
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    const TOL: f64 = -1e-9;
    let schema = vec![
        Column::new("inequality", ""),
        Column::new("instance", ""),
        Column::new("gap", ""),
        Column::new("verdict", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let mut passed = true;
    // Onsager
    let onsager_rows: Vec<(usize, f64)> = (0..onsager)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0415 ^ ((i as u64) << 13));
            let dim = 1 + (i % 3);
            let w = OnsagerPotential::Gaussian {
                amp: 0.5 + rng.random::<f64>() * 2.0,
                sigma: 0.3 + rng.random::<f64>(),
            };
            let per_axis = match dim {
                1 => 48,
                2 => 14,
                _ => 7,
            };
            let rho = DensityMeasure::gaussian_on_grid(
                dim,
                &vec![0.0; dim],
                0.4 + rng.random::<f64>(),
                2.5,
                per_axis,
                1.0 + rng.random::<f64>() * 4.0,
            );
            let n = 1 + (i % 6);
            let positions: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let gap = onsager_gap(&positions, &w, &rho).unwrap_or(f64::NAN);
            (i, gap)
        })
        .collect();
    for (i, gap) in onsager_rows {
        let ok = gap.is_finite() && gap >= TOL;
        passed &= ok;
        table.push(vec![
            Value::Text("onsager".into()),
            Value::Int(i as i64),
            Value::Float(gap),
            Value::Text(if ok { "ok".into() } else { format!("violated (seed {seed})") }),
        ]);
    }
    // Hoffmann-Ostenhof on small chains
    for i in 0..hoffmann {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x480F ^ ((i as u64) << 13));
        let sites = 3 + (i % 3);
        let mut m = DMatrix::<Complex64>::zeros(sites, sites);
        for s in 0..sites {
            m[(s, s)] = Complex64::new(2.0 + rng.random::<f64>(), 0.0);
            if s + 1 < sites {
                let hop = Complex64::new(-rng.random::<f64>(), 0.0);
                m[(s, s + 1)] = hop;
                m[(s + 1, s)] = hop;
            }
        }
        let h = OneBodyMatrix::new(m).expect("chain is Hermitian");
        let n = 2 + (i % 2);
        let basis = OccupationBasis::new(n, sites).expect("small basis");
        let mut psi = DVector::<Complex64>::zeros(basis.len());
        for z in psi.iter_mut() {
            *z = Complex64::new(rng.random::<f64>() - 0.5, 0.0);
        }
        let norm = psi.norm();
        psi /= Complex64::new(norm, 0.0);
        let gap = hoffmann_ostenhof_gap(&basis, &psi, &h).unwrap_or(f64::NAN);
        let ok = gap.is_finite() && gap >= TOL;
        passed &= ok;
        table.push(vec![
            Value::Text("hoffmann_ostenhof".into()),
            Value::Int(i as i64),
            Value::Float(gap),
            Value::Text(if ok { "ok".into() } else { format!("violated (seed {seed})") }),
        ]);
    }
    // Dyson radial instances
    for i in 0..dyson {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD450 ^ ((i as u64) << 13));
        let gap = (|| -> Result<f64> {
            let amp = 0.5 + rng.random::<f64>() * 3.0;
            let r0 = 0.5 + rng.random::<f64>();
            let w = match i % 3 {
                0 => RadialPotential::square_well(amp, r0)?,
                1 => RadialPotential::parabolic(amp, r0)?,
                _ => RadialPotential::bump(amp, r0)?,
            };
            let solution = solve_scattering(&w, 4.0 * r0, 1e-10)?;
            let inner = r0 * (1.0 + rng.random::<f64>());
            let outer = inner + 0.5 + 2.0 * rng.random::<f64>();
            let u = DysonPotential::annular(inner, outer, solution.scattering_length)?;
            // random smooth radial test function (sign changes allowed)
            let c1 = rng.random::<f64>() * 2.0 - 1.0;
            let c2 = rng.random::<f64>() * 2.0 - 1.0;
            let s = 0.5 + rng.random::<f64>() * 2.0;
            let f = move |r: f64| {
                let g = (-r * r / (2.0 * s * s)).exp();
                let v = 1.0 + c1 * g + c2 * r * g;
                let dv = c1 * (-r / (s * s)) * g + c2 * (g + r * (-r / (s * s)) * g);
                (v, dv)
            };
            let (lhs, rhs) = dyson_transform(&w, &u, &f, outer + 1.0)?;
            Ok(lhs - rhs)
        })()
        .unwrap_or(f64::NAN);
        let ok = gap.is_finite() && gap >= -1e-8;
        passed &= ok;
        table.push(vec![
            Value::Text("dyson".into()),
            Value::Int(i as i64),
            Value::Float(gap),
            Value::Text(if ok { "ok".into() } else { format!("violated (seed {seed})") }),
        ]);
    }
    ExperimentOutcome {
        name: name.into(),
        table,
        passed,
        summary: format!("{onsager} + {hoffmann} + {dyson} randomized instances"),
    }
}

// ---------------------------------------------------------------------------

pub fn run_gp_minimize(
    grid_points: usize,
    scattering_length: f64,
    tol: f64,
    seed: u64,
    name: &str,
    provenance: &Provenance,
) -> ExperimentOutcome {
    let schema = vec![
        Column::new("case", ""),
        Column::new("value", ""),
        Column::new("reference", ""),
        Column::new("status", ""),
    ];
    let mut table = ResultTable::new(schema, provenance.clone());
    let mut passed = true;
    // torus: the minimizer is the constant with energy 4π a
    match Grid::cube(3, grid_points, 1.0, Boundary::Periodic).and_then(|grid| {
        let problem =
            MeanFieldProblem::gp(&grid, PotentialPreset::Zero, GaugePreset::Zero, scattering_length);
        let mut start = crate::meanfield::Field::constant_normalized(&grid);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for z in start.data.iter_mut() {
            *z += Complex64::new(0.03 * (rng.random::<f64>() - 0.5), 0.0);
        }
        minimize(&problem, MinimizerInit::Field(start), tol, 400_000)
            .map(|out| (problem, out))
    }) {
        Ok((problem, out)) => {
            let expect = 4.0 * std::f64::consts::PI * scattering_length;
            let ok = (out.energy - expect).abs() <= 1e-8;
            passed &= ok;
            table.push(vec![
                Value::Text("torus_energy".into()),
                Value::Float(out.energy),
                Value::Float(expect),
                Value::Text(if ok { "ok".into() } else { "violated".to_string() }),
            ]);
            let (res, _) = problem.equation_residual(&out.u);
            let ok = res <= 1e-6;
            passed &= ok;
            table.push(vec![
                Value::Text("torus_residual".into()),
                Value::Float(res),
                Value::Float(1e-6),
                Value::Text(if ok { "ok".into() } else { "violated".to_string() }),
            ]);
        }
        Err(e) => {
            passed = false;
            table.push(vec![
                Value::Text("torus".into()),
                Value::Float(f64::NAN),
                Value::Float(f64::NAN),
                Value::Text(format!("error: {e}")),
            ]);
        }
    }
    // trapped: Euler-Lagrange residual below tolerance
    match Grid::cube(3, grid_points.max(16), 12.0, Boundary::Box).and_then(|grid| {
        let problem = MeanFieldProblem::gp(
            &grid,
            PotentialPreset::Harmonic,
            GaugePreset::Zero,
            scattering_length,
        );
        minimize(&problem, MinimizerInit::GroundOfLinear, 1e-6, 400_000).map(|out| (problem, out))
    }) {
        Ok((problem, out)) => {
            let (res, mu) = problem.equation_residual(&out.u);
            let ok = res < 1e-6;
            passed &= ok;
            table.push(vec![
                Value::Text("trapped_residual".into()),
                Value::Float(res),
                Value::Float(1e-6),
                Value::Text(if ok { "ok".into() } else { "violated".to_string() }),
            ]);
            let quart = out.u.quartic_integral();
            let mu_expect = out.energy + 4.0 * std::f64::consts::PI * scattering_length * quart;
            let ok = (mu - mu_expect).abs() <= 1e-5 * (1.0 + mu.abs());
            passed &= ok;
            table.push(vec![
                Value::Text("trapped_chemical_potential".into()),
                Value::Float(mu),
                Value::Float(mu_expect),
                Value::Text(if ok { "ok".into() } else { "violated".to_string() }),
            ]);
        }
        Err(e) => {
            passed = false;
            table.push(vec![
                Value::Text("trapped".into()),
                Value::Float(f64::NAN),
                Value::Float(f64::NAN),
                Value::Text(format!("error: {e}")),
            ]);
        }
    }
    ExperimentOutcome {
        name: name.into(),
        table,
        passed,
        summary: "GP minimizers checked".into(),
    }
}
