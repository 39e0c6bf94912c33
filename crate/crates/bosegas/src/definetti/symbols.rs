//! Coherent-state symbol calculus for polynomial operators.
//!
//! A [`SymbolPolynomial`] stores coefficients of normal-ordered monomial
//! signatures `(a†)^α (a)^β` over `D` modes, which is the same data as a
//! polynomial in `(Z̄, Z)`: the lower symbol of the monomial is
//! `Z̄^α Z^β`. Upper and lower symbols are related by the heat operator
//! `e^{∂_Z · ∂_Z̄}`, which truncates exactly on polynomials.

use crate::error::Error;
use crate::fock::{LadderMonomial, TruncatedFockBasis};
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

type Signature = (Vec<u8>, Vec<u8>);

/// Polynomial in creators/annihilators (equivalently in `Z̄, Z`), as a
/// coefficient map from normal-ordered monomial signatures.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPolynomial {
    dim: usize,
    terms: BTreeMap<Signature, Complex64>,
}

impl SymbolPolynomial {
    pub fn new(dim: usize) -> Self {
        SymbolPolynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::new(dim);
        p.add_term(&vec![0u8; dim], &vec![0u8; dim], c);
        p
    }

    /// Add `c · (a†)^creators (a)^annihilators` (exponent vectors).
    pub fn add_term(&mut self, creators: &[u8], annihilators: &[u8], c: Complex64) {
        assert_eq!(creators.len(), self.dim);
        assert_eq!(annihilators.len(), self.dim);
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let key = (creators.to_vec(), annihilators.to_vec());
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() == 0.0 {
            let key = (creators.to_vec(), annihilators.to_vec());
            self.terms.remove(&key);
        }
    }

    /// Normal-ordered monomial from index lists.
    pub fn from_monomial(dim: usize, monomial: &LadderMonomial, c: Complex64) -> Result<Self> {
        if !monomial.normal_ordered {
            return Err(Error::invalid("symbol signatures are normal ordered"));
        }
        let mut creators = vec![0u8; dim];
        let mut annihilators = vec![0u8; dim];
        for &j in &monomial.creators {
            if j >= dim {
                return Err(Error::invalid("mode index out of range"));
            }
            creators[j] += 1;
        }
        for &j in &monomial.annihilators {
            if j >= dim {
                return Err(Error::invalid("mode index out of range"));
            }
            annihilators[j] += 1;
        }
        let mut p = Self::new(dim);
        p.add_term(&creators, &annihilators, c);
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &[u8], Complex64)> {
        self.terms.iter().map(|((a, b), &c)| (a.as_slice(), b.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|(a, b)| {
                a.iter().map(|&x| x as usize).sum::<usize>()
                    + b.iter().map(|&x| x as usize).sum::<usize>()
            })
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in self.terms.values_mut() {
            *v *= s;
        }
    }

    pub fn add(&mut self, other: &SymbolPolynomial) {
        assert_eq!(self.dim, other.dim);
        for ((a, b), &c) in &other.terms {
            self.add_term(a, b, c);
        }
    }

    pub fn max_coefficient_diff(&self, other: &SymbolPolynomial) -> f64 {
        let mut keys: std::collections::BTreeSet<&Signature> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.iter()
            .map(|k| {
                let a = self.terms.get(*k).copied().unwrap_or(Complex64::new(0.0, 0.0));
                let b = other.terms.get(*k).copied().unwrap_or(Complex64::new(0.0, 0.0));
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Evaluate as a function of `Z`: the substitution `a† -> z̄, a -> z`.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for ((alpha, beta), &c) in &self.terms {
            let mut term = c;
            for j in 0..self.dim {
                for _ in 0..alpha[j] {
                    term *= z[j].conj();
                }
                for _ in 0..beta[j] {
                    term *= z[j];
                }
            }
            acc += term;
        }
        acc
    }

    /// `L = sum_j ∂_{z_j} ∂_{z̄_j}` applied once.
    pub fn laplacian(&self) -> SymbolPolynomial {
        let mut out = SymbolPolynomial::new(self.dim);
        for ((alpha, beta), &c) in &self.terms {
            for j in 0..self.dim {
                let a = alpha[j] as f64;
                let b = beta[j] as f64;
                if a > 0.0 && b > 0.0 {
                    let mut na = alpha.clone();
                    let mut nb = beta.clone();
                    na[j] -= 1;
                    nb[j] -= 1;
                    out.add_term(&na, &nb, c * (a * b));
                }
            }
        }
        out
    }

    /// `e^{sign L}` (exact: the series terminates on polynomials).
    pub fn heat(&self, sign: f64) -> SymbolPolynomial {
        let mut out = self.clone();
        let mut power = self.clone();
        let mut factorial = 1.0f64;
        for p in 1..=self.degree() {
            power = power.laplacian();
            if power.terms.is_empty() {
                break;
            }
            factorial *= p as f64;
            let mut contribution = power.clone();
            contribution.scale(Complex64::new(sign.powi(p as i32) / factorial, 0.0));
            out.add(&contribution);
        }
        out
    }
}

/// Lower symbol of a normal-ordered polynomial at the point `Z`:
/// plain substitution `a† -> z̄, a -> z`.
pub fn lower_symbol(op: &SymbolPolynomial, z: &[Complex64]) -> Complex64 {
    op.evaluate(z)
}

/// Upper symbol as a polynomial: `A^up = e^{-∂·∂̄} A^low`.
pub fn upper_symbol(op: &SymbolPolynomial) -> SymbolPolynomial {
    op.heat(-1.0)
}

/// Forward heat flow `e^{+∂·∂̄}`: applied to the upper symbol it recovers
/// the lower symbol exactly.
pub fn heat_forward(op: &SymbolPolynomial) -> SymbolPolynomial {
    op.heat(1.0)
}

/// The two-term expansion `A^up - A^low = (-L + L²/2) A^low`, exact for
/// polynomials of degree <= 4.
pub fn symbol_difference(op: &SymbolPolynomial) -> Result<SymbolPolynomial> {
    if op.degree() > 4 {
        return Err(Error::invalid("the two-term expansion is exact only up to quartics"));
    }
    let l1 = op.laplacian();
    let l2 = l1.laplacian();
    let mut out = SymbolPolynomial::new(op.dim());
    let mut first = l1;
    first.scale(Complex64::new(-1.0, 0.0));
    out.add(&first);
    let mut second = l2;
    second.scale(Complex64::new(0.5, 0.0));
    out.add(&second);
    Ok(out)
}

/// Operator ordering when a polynomial is quantized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizationOrder {
    /// All creators left of annihilators: `E(a†, a)`.
    Wick,
    /// All annihilators left of creators: `E(a, a†)`.
    AntiWick,
}

/// Matrix of the quantized polynomial on a particle-number-truncated Fock
/// space. Matrix elements are exact (monomials map basis states to basis
/// states), so the result is the exact compression of the operator.
pub fn quantize(
    op: &SymbolPolynomial,
    basis: &TruncatedFockBasis,
    order: QuantizationOrder,
) -> DMatrix<Complex64> {
    let dim = basis.len();
    let d = basis.modes();
    assert_eq!(d, op.dim());
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut scratch = vec![0u32; d];
    for ((alpha, beta), &c) in &op.terms {
        let mut creators = Vec::new();
        let mut annihilators = Vec::new();
        for j in 0..d {
            for _ in 0..alpha[j] {
                creators.push(j);
            }
            for _ in 0..beta[j] {
                annihilators.push(j);
            }
        }
        let monomial = match order {
            QuantizationOrder::Wick => LadderMonomial::normal(creators, annihilators),
            QuantizationOrder::AntiWick => LadderMonomial::anti_normal(creators, annihilators),
        };
        for n in 0..=basis.cap() {
            let sector = basis.sector(n);
            for (local, occ) in sector.states().enumerate() {
                scratch.copy_from_slice(occ);
                let amp = crate::fock::apply_monomial_to_occupation(&monomial, &mut scratch);
                if amp != 0.0 {
                    if let Some(row) = basis.index_of(&scratch) {
                        let col = basis.offset(n) + local;
                        m[(row, col)] += c * amp;
                    }
                }
            }
        }
    }
    m
}

/// Normal-order an anti-Wick polynomial: rewrites `E(a, a†)` as a
/// normal-ordered polynomial using, per mode,
/// `a^m (a†)^n = sum_k k! C(m,k) C(n,k) (a†)^{n-k} a^{m-k}`.
pub fn normal_order_anti_wick(op: &SymbolPolynomial) -> SymbolPolynomial {
    let d = op.dim();
    let mut out = SymbolPolynomial::new(d);
    for ((alpha, beta), &c) in &op.terms {
        // start with the scalar coefficient; expand mode by mode
        let mut partial: Vec<(Vec<u8>, Vec<u8>, f64)> =
            vec![(vec![0u8; d], vec![0u8; d], 1.0)];
        for j in 0..d {
            let m = beta[j] as usize; // annihilators acting first (left)
            let n = alpha[j] as usize;
            let mut next = Vec::new();
            for k in 0..=m.min(n) {
                // k! C(m,k) C(n,k) = (m falling k)(n falling k) / k!
                let mut factor = 1.0f64;
                for i in 0..k {
                    factor *= ((m - i) * (n - i)) as f64 / (i + 1) as f64;
                }
                for (ca, cb, cf) in &partial {
                    let mut na = ca.clone();
                    let mut nb = cb.clone();
                    na[j] = (n - k) as u8;
                    nb[j] = (m - k) as u8;
                    next.push((na, nb, cf * factor));
                }
            }
            partial = next;
        }
        for (na, nb, cf) in partial {
            out.add_term(&na, &nb, c * cf);
        }
    }
    out
}

/// Coefficients of the coherent state `Ψ_Z` on a truncated Fock basis:
/// `<m|Ψ_Z> = e^{-|Z|²/2} prod z_j^{m_j} / sqrt(m_j!)`.
pub fn coherent_state(basis: &TruncatedFockBasis, z: &[Complex64]) -> DVector<Complex64> {
    let d = basis.modes();
    assert_eq!(z.len(), d);
    let norm2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    let prefactor = (-norm2 / 2.0).exp();
    let mut out = DVector::<Complex64>::zeros(basis.len());
    for n in 0..=basis.cap() {
        let sector = basis.sector(n);
        for (local, occ) in sector.states().enumerate() {
            let mut amp = Complex64::new(prefactor, 0.0);
            for j in 0..d {
                let mut fact = 1.0f64;
                for x in 1..=occ[j] {
                    fact *= x as f64;
                }
                let mut power = Complex64::new(1.0, 0.0);
                for _ in 0..occ[j] {
                    power *= z[j];
                }
                amp *= power / Complex64::new(fact.sqrt(), 0.0);
            }
            out[basis.offset(n) + local] = amp;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn number_poly(dim: usize, mode: usize) -> SymbolPolynomial {
        SymbolPolynomial::from_monomial(
            dim,
            &LadderMonomial::number(mode),
            Complex64::new(1.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn lower_symbol_examples() {
        // a†_1 a_1 at Z -> |z_1|²
        let p = number_poly(2, 0);
        let z = [Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.2)];
        assert_abs_diff_eq!(
            lower_symbol(&p, &z).re,
            z[0].norm_sqr(),
            epsilon = 1e-14
        );
        // identity -> 1
        let one = SymbolPolynomial::constant(2, Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(lower_symbol(&one, &z).re, 1.0, epsilon = 1e-15);
        // a†_1 a†_2 a_1 a_2 -> |z_1|² |z_2|²
        let p = SymbolPolynomial::from_monomial(
            2,
            &LadderMonomial::normal(vec![0, 1], vec![0, 1]),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(
            lower_symbol(&p, &z).re,
            z[0].norm_sqr() * z[1].norm_sqr(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn upper_symbol_examples() {
        // a†a -> |z|² - 1
        let p = number_poly(1, 0);
        let up = upper_symbol(&p);
        let mut expect = p.clone();
        expect.add_term(&[0], &[0], Complex64::new(-1.0, 0.0));
        assert!(up.max_coefficient_diff(&expect) < 1e-14);
        // constants are fixed points
        let c = SymbolPolynomial::constant(3, Complex64::new(2.5, -1.0));
        assert!(upper_symbol(&c).max_coefficient_diff(&c) < 1e-15);
        // a†a†aa -> |z|⁴ - 4|z|² + 2
        let p = SymbolPolynomial::from_monomial(
            1,
            &LadderMonomial::normal(vec![0, 0], vec![0, 0]),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let up = upper_symbol(&p);
        let mut expect = p.clone();
        expect.add_term(&[1], &[1], Complex64::new(-4.0, 0.0));
        expect.add_term(&[0], &[0], Complex64::new(2.0, 0.0));
        assert!(up.max_coefficient_diff(&expect) < 1e-14);
    }

    fn random_quartic(dim: usize, seed: u64) -> SymbolPolynomial {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = SymbolPolynomial::new(dim);
        for _ in 0..12 {
            let mut alpha = vec![0u8; dim];
            let mut beta = vec![0u8; dim];
            let total = rng.random_range(0..=4usize);
            let creators = rng.random_range(0..=total);
            for _ in 0..creators {
                alpha[rng.random_range(0..dim)] += 1;
            }
            for _ in 0..total - creators {
                beta[rng.random_range(0..dim)] += 1;
            }
            p.add_term(
                &alpha,
                &beta,
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            );
        }
        p
    }

    #[test]
    fn heat_relation_round_trips_exactly() {
        for seed in 0..20u64 {
            let dim = 1 + (seed as usize % 3);
            let p = random_quartic(dim, seed);
            let up = upper_symbol(&p);
            let back = heat_forward(&up);
            assert!(
                back.max_coefficient_diff(&p) <= 1e-12,
                "heat roundtrip failed at seed {seed}"
            );
        }
    }

    #[test]
    fn symbol_difference_examples() {
        // quadratic sum h_j |z_j|²: difference is the constant -sum h_j
        let mut p = SymbolPolynomial::new(2);
        p.add_term(&[1, 0], &[1, 0], Complex64::new(0.4, 0.0));
        p.add_term(&[0, 1], &[0, 1], Complex64::new(1.7, 0.0));
        let diff = symbol_difference(&p).unwrap();
        let expect = SymbolPolynomial::constant(2, Complex64::new(-2.1, 0.0));
        assert!(diff.max_coefficient_diff(&expect) < 1e-14);
        // constants: zero difference
        let c = SymbolPolynomial::constant(2, Complex64::new(3.0, 0.0));
        assert_eq!(symbol_difference(&c).unwrap().num_terms(), 0);
    }

    #[test]
    fn symbol_difference_of_number_penalty() {
        // P = (K/N)(S - N)², S = sum |z_j|²:
        // A^up - A^low = (K/N)[ -2(D+1) S + 2ND + D(D+1) ]
        let dim = 3usize;
        let kappa = 0.8;
        let nn = 50.0;
        let mut p = SymbolPolynomial::new(dim);
        // S²
        for i in 0..dim {
            for j in 0..dim {
                let mut a = vec![0u8; dim];
                let mut b = vec![0u8; dim];
                a[i] += 1;
                b[i] += 1;
                a[j] += 1;
                b[j] += 1;
                p.add_term(&a, &b, Complex64::new(kappa / nn, 0.0));
            }
        }
        // -2N S
        for i in 0..dim {
            let mut a = vec![0u8; dim];
            let mut b = vec![0u8; dim];
            a[i] = 1;
            b[i] = 1;
            p.add_term(&a, &b, Complex64::new(-2.0 * kappa, 0.0));
        }
        // + N²
        p.add_term(&vec![0; dim], &vec![0; dim], Complex64::new(kappa * nn, 0.0));
        let diff = symbol_difference(&p).unwrap();
        let d = dim as f64;
        let mut expect = SymbolPolynomial::new(dim);
        for i in 0..dim {
            let mut a = vec![0u8; dim];
            let mut b = vec![0u8; dim];
            a[i] = 1;
            b[i] = 1;
            expect.add_term(&a, &b, Complex64::new(-2.0 * kappa * (d + 1.0) / nn, 0.0));
        }
        expect.add_term(
            &vec![0; dim],
            &vec![0; dim],
            Complex64::new(kappa * (2.0 * d + d * (d + 1.0) / nn), 0.0),
        );
        assert!(
            diff.max_coefficient_diff(&expect) < 1e-12,
            "penalty difference mismatch"
        );
    }

    #[test]
    fn symbol_difference_matches_finite_difference_heat_step() {
        // check L against a central finite-difference complex Laplacian
        let p = random_quartic(2, 99);
        let l = p.laplacian();
        let z = [Complex64::new(0.4, -0.3), Complex64::new(-0.2, 0.8)];
        let h = 1e-4;
        let mut fd = Complex64::new(0.0, 0.0);
        for j in 0..2 {
            for (re, im) in [(h, 0.0), (0.0, h)] {
                let mut zp = z;
                let mut zm = z;
                zp[j] += Complex64::new(re, im);
                zm[j] -= Complex64::new(re, im);
                fd += (p.evaluate(&zp) - p.evaluate(&z) * 2.0 + p.evaluate(&zm))
                    / Complex64::new(4.0 * h * h, 0.0);
            }
        }
        let exact = l.evaluate(&z);
        assert!(
            (fd - exact).norm() < 1e-5 * (1.0 + exact.norm()),
            "fd {fd} vs {exact}"
        );
    }

    #[test]
    fn one_mode_wick_vs_antiwick_is_exactly_the_identity_shift() {
        // E = |z|²: Wick = a†a, anti-Wick = aa† = a†a + 1
        let basis = TruncatedFockBasis::new(1, 10).unwrap();
        let p = number_poly(1, 0);
        let wick = quantize(&p, &basis, QuantizationOrder::Wick);
        let anti = quantize(&p, &basis, QuantizationOrder::AntiWick);
        let diff = &anti - &wick;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(diff[(i, j)], Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn constant_quantizes_to_itself() {
        let basis = TruncatedFockBasis::new(2, 4).unwrap();
        let c = SymbolPolynomial::constant(2, Complex64::new(1.5, 0.0));
        let wick = quantize(&c, &basis, QuantizationOrder::Wick);
        let anti = quantize(&c, &basis, QuantizationOrder::AntiWick);
        assert!((&wick - &anti).norm() < 1e-15);
        assert!((wick[(0, 0)] - Complex64::new(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn antiwick_matches_symbolic_normal_ordering() {
        // quartic E: the anti-Wick matrix equals the Wick matrix of the
        // symbolically normal-ordered polynomial, on the inner block where
        // no truncation is felt
        let basis = TruncatedFockBasis::new(2, 8).unwrap();
        for seed in 0..6u64 {
            let p = random_quartic(2, 200 + seed);
            let anti = quantize(&p, &basis, QuantizationOrder::AntiWick);
            let reordered = normal_order_anti_wick(&p);
            let wick_of_reordered = quantize(&reordered, &basis, QuantizationOrder::Wick);
            // compare on states with n <= cap - 4 (creators can climb by 4)
            let inner = TruncatedFockBasis::new(2, 4).unwrap();
            for r in 0..inner.len() {
                for c in 0..inner.len() {
                    let d = (anti[(r, c)] - wick_of_reordered[(r, c)]).norm();
                    assert!(d < 1e-10, "mismatch at ({r},{c}): {d}");
                }
            }
        }
    }

    #[test]
    fn wick_matrix_lower_symbol_is_the_polynomial() {
        // <Ψ_Z| E^W |Ψ_Z> ≈ E(Z) up to coherent-state truncation leakage
        let basis = TruncatedFockBasis::new(1, 30).unwrap();
        let p = random_quartic(1, 7);
        let wick = quantize(&p, &basis, QuantizationOrder::Wick);
        for z0 in [Complex64::new(0.4, 0.2), Complex64::new(-0.9, 0.5)] {
            let psi = coherent_state(&basis, &[z0]);
            let lhs = psi.dotc(&(&wick * &psi));
            let rhs = p.evaluate(&[z0]);
            assert!(
                (lhs - rhs).norm() < 1e-8,
                "lower symbol mismatch at {z0}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn upper_symbol_reconstructs_the_operator_by_monte_carlo() {
        // E^W = π^{-D} ∫ A^up(Z) |Ψ_Z><Ψ_Z| dZ, sampled with the unit
        // complex Gaussian (the e^{-|Z|²} factor of the coherent overlap
        // makes the Gaussian the exact importance density)
        let basis = TruncatedFockBasis::new(1, 12).unwrap();
        let p = SymbolPolynomial::from_monomial(
            1,
            &LadderMonomial::normal(vec![0, 0], vec![0, 0]),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let up = upper_symbol(&p);
        let wick = quantize(&p, &basis, QuantizationOrder::Wick);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let samples = 2_000_000usize;
        let probe = 3usize; // compare the top-left block (higher entries have heavy-tailed estimators)
        let mut acc = DMatrix::<Complex64>::zeros(probe, probe);
        for _ in 0..samples {
            // z ~ exp(-|z|²)/π
            let (g1, g2): (f64, f64) = (gauss(&mut rng), gauss(&mut rng));
            let z = Complex64::new(g1 / 2f64.sqrt(), g2 / 2f64.sqrt());
            let amp = up.evaluate(&[z]);
            // |Ψ_Z><Ψ_Z| e^{+|z|²} has entries z^m z̄^{m'} / sqrt(m! m'!)
            let mut pows = vec![Complex64::new(1.0, 0.0); probe];
            for m in 1..probe {
                pows[m] = pows[m - 1] * z / Complex64::new((m as f64).sqrt(), 0.0);
            }
            for r in 0..probe {
                for c in 0..probe {
                    acc[(r, c)] += amp * pows[r] * pows[c].conj();
                }
            }
        }
        acc /= Complex64::new(samples as f64, 0.0);
        for r in 0..probe {
            for c in 0..probe {
                let diff = (acc[(r, c)] - wick[(r, c)]).norm();
                assert!(
                    diff < 0.08,
                    "MC reconstruction off at ({r},{c}): {} vs {}",
                    acc[(r, c)],
                    wick[(r, c)]
                );
            }
        }
    }

    fn gauss(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
