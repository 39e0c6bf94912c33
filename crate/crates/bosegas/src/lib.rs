//! Numerical laboratory for scaling limits of bosonic ground states.
//!
//! The crate implements, at desk scale, the concrete objects that appear in
//! the mean-field / dilute / Gross-Pitaevskii analysis of trapped Bose gases:
//!
//! - [`fock`] — occupation-number bases for `N` bosons in `D` modes and exact
//!   ladder-operator actions (CCR checked to machine precision).
//! - [`manybody`] — sparse second-quantized Hamiltonians, Lanczos ground
//!   states with a dense oracle, reduced density matrices, condensate
//!   fractions, second moments, two-body energy localization and the
//!   excitation map.
//! - [`meanfield`] — Hartree / NLS / Gross-Pitaevskii functionals on gauge
//!   covariant lattices, projected-gradient minimizers, stability checks and
//!   the 2D Gagliardo-Nirenberg constant.
//! - [`scattering`] — the zero-energy radial two-body problem: scattering
//!   length, finite-ball energies, the Born series, Dyson potential
//!   softening, and Onsager's classical lower bound.
//! - [`definetti`] — coherent-state sampling of the lower-symbol (CKMR)
//!   measure, reduced-matrix reconstruction with its `D k / N` error rate,
//!   and the upper/lower symbol calculus (Wick vs anti-Wick).
//! - [`bogoliubov`] — quadratic Hamiltonians with pairing: closed-form
//!   ground energy, truncated-Fock oracle, quasi-free states and the Wick
//!   rule, and the GP pair-correlation kernel.
//! - [`trialstates`] — Jastrow / Dyson correlated wavefunctions and
//!   variational Monte Carlo estimates of their energy.
//! - [`harness`] — experiment configs, sweep runners, deterministic result
//!   tables and CSV/JSON export.
//!
//! Every runnable capability has a corresponding example under `examples/`;
//! `cargo run --example <name>` is the quickest tour. The `bosegas` binary
//! exposes `run`, `validate` and `report` subcommands over the same harness.

pub mod bogoliubov;
pub mod definetti;
pub mod error;
pub mod fock;
pub mod harness;
pub mod lanczos;
pub mod linalg;
pub mod manybody;
pub mod meanfield;
pub mod scattering;
pub mod sparse;
pub mod trialstates;

pub use error::Error;

#[cfg(test)]
pub(crate) mod testutil {
    /// Least-squares slope of (x, y) points.
    pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
