//! Bosonic occupation-number bases and exact ladder-operator actions.
//!
//! States of `N` bosons in `D` one-body modes are labelled by occupation
//! vectors `(n_1, ..., n_D)` with `sum n_j = N`, ordered by descending
//! lexicographic order (so `(N, 0, ..., 0)` comes first). Index lookup is a
//! stars-and-bars combinatorial rank, not a hash map.

use crate::error::Error;
use crate::Result;
use nalgebra::DVector;
use num_complex::Complex64;

/// The one-body mode space: a `D`-dimensional complex Hilbert space with
/// optional per-mode labels (lattice sites, plane-wave momenta, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpace {
    dimension: usize,
    labels: Option<Vec<String>>,
}

impl ModeSpace {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("mode space needs dimension >= 1"));
        }
        Ok(ModeSpace { dimension, labels: None })
    }

    pub fn with_labels(dimension: usize, labels: Vec<String>) -> Result<Self> {
        if labels.len() != dimension {
            return Err(Error::dim(format!(
                "{} labels for {} modes",
                labels.len(),
                dimension
            )));
        }
        let mut space = ModeSpace::new(dimension)?;
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// `C(n, k)` with overflow detection.
fn binomial_checked(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Dimension of the `N`-boson sector over `D` modes: `C(N + D - 1, D - 1)`.
///
/// Fails when the count exceeds the machine integer range, which signals the
/// instance is too large to enumerate anyway.
pub fn basis_dimension(particles: usize, modes: usize) -> Result<usize> {
    if modes == 0 {
        return Err(Error::invalid("mode count must be >= 1"));
    }
    let n = particles as u64;
    let d = modes as u64;
    let dim = binomial_checked(n + d - 1, d - 1)
        .ok_or_else(|| Error::BasisOverflow(format!("N={particles}, D={modes}")))?;
    usize::try_from(dim).map_err(|_| Error::BasisOverflow(format!("N={particles}, D={modes}")))
}

/// Enumerated occupation basis of the `N`-particle sector.
#[derive(Debug, Clone)]
pub struct OccupationBasis {
    modes: ModeSpace,
    particles: usize,
    states: Vec<Vec<u32>>,
    /// binom[n][k] for the ranking formula, n <= N + D.
    binom: Vec<Vec<u64>>,
}

impl OccupationBasis {
    pub fn new(particles: usize, modes: usize) -> Result<Self> {
        let space = ModeSpace::new(modes)?;
        Self::with_modes(particles, space)
    }

    pub fn with_modes(particles: usize, modes: ModeSpace) -> Result<Self> {
        let d = modes.dimension();
        let dim = basis_dimension(particles, d)?;
        let mut states = Vec::with_capacity(dim);
        let mut current = vec![0u32; d];
        current[0] = particles as u32;
        loop {
            states.push(current.clone());
            if !next_descending_lex(&mut current) {
                break;
            }
        }
        debug_assert_eq!(states.len(), dim);
        // Pascal rows truncated at column d: the rank formula only reads
        // C(x, k) for k <= D - 2, and the truncated entries stay far below
        // u64 range whenever the basis itself is enumerable.
        let top = particles + d + 1;
        let width = d + 1;
        let mut binom = vec![vec![0u64; width]; top + 1];
        for n in 0..=top {
            binom[n][0] = 1;
            for k in 1..width.min(n + 1) {
                let left = binom[n - 1][k - 1];
                let right = if k <= n - 1 { binom[n - 1][k] } else { 0 };
                binom[n][k] = left + right;
            }
        }
        Ok(OccupationBasis { modes, particles, states, binom })
    }

    pub fn mode_space(&self) -> &ModeSpace {
        &self.modes
    }

    pub fn modes(&self) -> usize {
        self.modes.dimension()
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, index: usize) -> &[u32] {
        &self.states[index]
    }

    pub fn states(&self) -> impl Iterator<Item = &[u32]> {
        self.states.iter().map(|s| s.as_slice())
    }

    /// Combinatorial rank of an occupation vector in descending lex order.
    ///
    /// O(D + N), allocation free.
    pub fn index_of(&self, occupation: &[u32]) -> usize {
        debug_assert_eq!(occupation.len(), self.modes());
        debug_assert_eq!(
            occupation.iter().map(|&n| n as usize).sum::<usize>(),
            self.particles
        );
        let d = self.modes();
        let mut rank = 0u64;
        let mut remaining = self.particles as u64;
        for j in 0..d.saturating_sub(1) {
            let tail_modes = (d - j - 2) as u64;
            let nj = occupation[j] as u64;
            // states with a larger occupation of mode j come first
            for k in (nj + 1)..=remaining {
                rank += self.binom[(remaining - k + tail_modes) as usize][tail_modes as usize];
            }
            remaining -= nj;
        }
        rank as usize
    }
}

/// Step to the next occupation vector in descending lexicographic order.
/// Returns false when the input was the last one.
fn next_descending_lex(v: &mut [u32]) -> bool {
    let d = v.len();
    if d == 1 {
        return false;
    }
    // rightmost position before the last with a particle to move
    let mut i = d - 1;
    let mut found = false;
    while i > 0 {
        i -= 1;
        if v[i] > 0 {
            found = true;
            break;
        }
    }
    if !found {
        return false;
    }
    v[i] -= 1;
    let tail: u32 = v[i + 1..].iter().sum();
    for x in v[i + 1..].iter_mut() {
        *x = 0;
    }
    v[i + 1] = tail + 1;
    true
}

/// A product of creation and annihilation operators.
///
/// `normal_ordered = true` places every creator left of every annihilator
/// (`a†_{i_1} ... a†_{i_k} a_{j_1} ... a_{j_l}`); `false` is the anti-normal
/// order with all annihilators on the left, so creators act on a ket first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderMonomial {
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
    pub normal_ordered: bool,
}

impl LadderMonomial {
    pub fn normal(creators: Vec<usize>, annihilators: Vec<usize>) -> Self {
        LadderMonomial { creators, annihilators, normal_ordered: true }
    }

    pub fn anti_normal(creators: Vec<usize>, annihilators: Vec<usize>) -> Self {
        LadderMonomial { creators, annihilators, normal_ordered: false }
    }

    pub fn creator(mode: usize) -> Self {
        Self::normal(vec![mode], vec![])
    }

    pub fn annihilator(mode: usize) -> Self {
        Self::normal(vec![], vec![mode])
    }

    /// `a†_j a_j`.
    pub fn number(mode: usize) -> Self {
        Self::normal(vec![mode], vec![mode])
    }

    pub fn degree(&self) -> usize {
        self.creators.len() + self.annihilators.len()
    }

    /// Particle-number change `#creators - #annihilators`.
    pub fn particle_shift(&self) -> isize {
        self.creators.len() as isize - self.annihilators.len() as isize
    }
}

/// Result of applying a ladder monomial to a sector state.
#[derive(Debug, Clone)]
pub enum LadderAction {
    /// Coefficient vector over `OccupationBasis(target_particles, D)`.
    Vector {
        target_particles: usize,
        coeffs: DVector<Complex64>,
    },
    /// The action emptied the Fock space (target sector would have negative
    /// particle number); the zero vector of the empty sector, flagged.
    Annihilated,
}

impl LadderAction {
    pub fn into_vector(self) -> Option<(usize, DVector<Complex64>)> {
        match self {
            LadderAction::Vector { target_particles, coeffs } => Some((target_particles, coeffs)),
            LadderAction::Annihilated => None,
        }
    }
}

/// Apply a monomial on an occupation vector in place.
///
/// Returns the bosonic amplitude, or 0.0 if some annihilator hits an empty
/// mode. The integer product under the square root is accumulated first and
/// rooted once, so perfect squares (e.g. `a a†` on any state) come out
/// exact.
pub(crate) fn apply_monomial_to_occupation(
    monomial: &LadderMonomial,
    occ: &mut [u32],
) -> f64 {
    let mut amp2 = 1.0f64;
    let apply_annihilators = |occ: &mut [u32], amp2: &mut f64| -> bool {
        for &j in monomial.annihilators.iter().rev() {
            if occ[j] == 0 {
                return false;
            }
            *amp2 *= occ[j] as f64;
            occ[j] -= 1;
        }
        true
    };
    let apply_creators = |occ: &mut [u32], amp2: &mut f64| {
        for &j in monomial.creators.iter().rev() {
            occ[j] += 1;
            *amp2 *= occ[j] as f64;
        }
    };
    if monomial.normal_ordered {
        if !apply_annihilators(occ, &mut amp2) {
            return 0.0;
        }
        apply_creators(occ, &mut amp2);
    } else {
        apply_creators(occ, &mut amp2);
        if !apply_annihilators(occ, &mut amp2) {
            return 0.0;
        }
    }
    amp2.sqrt()
}

/// Exact matrix action of a ladder monomial on a coefficient vector over
/// `basis`, with the bosonic normalization `a†|n> = sqrt(n+1)|n+1>`,
/// `a|n> = sqrt(n)|n-1>` per mode.
pub fn apply_ladder(
    monomial: &LadderMonomial,
    basis: &OccupationBasis,
    state: &DVector<Complex64>,
) -> Result<LadderAction> {
    if state.len() != basis.len() {
        return Err(Error::dim(format!(
            "state length {} vs basis size {}",
            state.len(),
            basis.len()
        )));
    }
    let d = basis.modes();
    for &j in monomial.creators.iter().chain(monomial.annihilators.iter()) {
        if j >= d {
            return Err(Error::invalid(format!("mode index {j} out of range (D={d})")));
        }
    }
    let shift = monomial.particle_shift();
    let target = basis.particles() as isize + shift;
    if target < 0 {
        return Ok(LadderAction::Annihilated);
    }
    let target = target as usize;
    let target_basis = OccupationBasis::new(target, d)?;
    let mut out = DVector::<Complex64>::zeros(target_basis.len());
    let mut scratch = vec![0u32; d];
    for (idx, occ) in basis.states().enumerate() {
        let c = state[idx];
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        scratch.copy_from_slice(occ);
        let amp = apply_monomial_to_occupation(monomial, &mut scratch);
        if amp != 0.0 {
            let t = target_basis.index_of(&scratch);
            out[t] += c * amp;
        }
    }
    Ok(LadderAction::Vector { target_particles: target, coeffs: out })
}

/// Coefficients of the pure condensate `u^{⊗N}` in the occupation basis:
/// `<m | u^{⊗N}> = sqrt(N! / prod m_j!) * prod u_j^{m_j}`.
///
/// Computed in log space so it stays finite for large `N`.
pub fn condensate_coefficients(basis: &OccupationBasis, u: &DVector<Complex64>) -> DVector<Complex64> {
    assert_eq!(u.len(), basis.modes());
    let n = basis.particles();
    let ln_fact = ln_factorial_table(n);
    let mut out = DVector::<Complex64>::zeros(basis.len());
    for (idx, occ) in basis.states().enumerate() {
        let mut log_mag = 0.5 * ln_fact[n];
        let mut phase = 0.0f64;
        let mut zero = false;
        for (j, &m) in occ.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let uj = u[j];
            if uj.norm() == 0.0 {
                zero = true;
                break;
            }
            log_mag += (m as f64) * uj.norm().ln() - 0.5 * ln_fact[m as usize];
            phase += (m as f64) * uj.arg();
        }
        if !zero {
            out[idx] = Complex64::from_polar(log_mag.exp(), phase);
        }
    }
    out
}

/// `ln(k!)` for `k = 0..=n`.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0f64; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

/// Re-express an `N`-particle state in the occupation basis of rotated modes.
///
/// `unitary` columns are the new modes in the old basis:
/// `v_j = sum_i unitary[(i, j)] e_i`. The returned coefficients are those of
/// the same state over `OccupationBasis(N, D)` built on the new modes.
pub fn rotate_modes(
    basis: &OccupationBasis,
    state: &DVector<Complex64>,
    unitary: &nalgebra::DMatrix<Complex64>,
) -> Result<DVector<Complex64>> {
    let d = basis.modes();
    if unitary.nrows() != d || unitary.ncols() != d {
        return Err(Error::dim("unitary must be D x D"));
    }
    if state.len() != basis.len() {
        return Err(Error::dim("state length vs basis size"));
    }
    let n = basis.particles();
    let ln_fact = ln_factorial_table(n);
    // a†_i = sum_j conj(U_{ij}) b†_j
    let mut out_map: std::collections::BTreeMap<Vec<u32>, Complex64> = Default::default();
    for (idx, occ) in basis.states().enumerate() {
        let c = state[idx];
        if c.norm() == 0.0 {
            continue;
        }
        // coefficient of the monomial form: c / sqrt(prod m_i!)
        let mut norm_log = 0.0;
        for &m in occ {
            norm_log -= 0.5 * ln_fact[m as usize];
        }
        let seed = c * norm_log.exp();
        // expand prod_i ( sum_j conj(U_ij) b†_j )^{m_i}
        let mut terms: std::collections::BTreeMap<Vec<u32>, Complex64> = Default::default();
        terms.insert(vec![0u32; d], seed);
        for (i, &m) in occ.iter().enumerate() {
            for _ in 0..m {
                let mut next: std::collections::BTreeMap<Vec<u32>, Complex64> = Default::default();
                for (mu, coeff) in &terms {
                    for j in 0..d {
                        let w = unitary[(i, j)].conj();
                        if w.norm() == 0.0 {
                            continue;
                        }
                        let mut mu2 = mu.clone();
                        mu2[j] += 1;
                        *next.entry(mu2).or_insert(Complex64::new(0.0, 0.0)) += coeff * w;
                    }
                }
                terms = next;
            }
        }
        for (mu, coeff) in terms {
            *out_map.entry(mu).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
    }
    // monomial prod (b†)^{mu} |0> = sqrt(prod mu_j!) |mu>
    let mut out = DVector::<Complex64>::zeros(basis.len());
    for (mu, coeff) in out_map {
        let mut log = 0.0;
        for &m in &mu {
            log += 0.5 * ln_fact[m as usize];
        }
        out[basis.index_of(&mu)] += coeff * log.exp();
    }
    Ok(out)
}

/// Particle-number-truncated Fock space `⊕_{n <= cap} Sym^n(C^D)`.
///
/// Sector bases are concatenated in increasing particle number; offsets give
/// the global index of each sector's first state.
#[derive(Debug, Clone)]
pub struct TruncatedFockBasis {
    modes: usize,
    cap: usize,
    sectors: Vec<OccupationBasis>,
    offsets: Vec<usize>,
    total: usize,
}

impl TruncatedFockBasis {
    pub fn new(modes: usize, cap: usize) -> Result<Self> {
        let mut sectors = Vec::with_capacity(cap + 1);
        let mut offsets = Vec::with_capacity(cap + 1);
        let mut total = 0usize;
        for n in 0..=cap {
            offsets.push(total);
            let b = OccupationBasis::new(n, modes)?;
            total += b.len();
            sectors.push(b);
        }
        Ok(TruncatedFockBasis { modes, cap, sectors, offsets, total })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn sector(&self, n: usize) -> &OccupationBasis {
        &self.sectors[n]
    }

    pub fn offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    /// Global index of an occupation vector (any total <= cap).
    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        let n: u32 = occ.iter().sum();
        let n = n as usize;
        if n > self.cap {
            return None;
        }
        Some(self.offsets[n] + self.sectors[n].index_of(occ))
    }

    /// `(sector, local index)` decomposition of a global index.
    pub fn locate(&self, index: usize) -> (usize, usize) {
        let mut n = match self.offsets.binary_search(&index) {
            Ok(n) => n,
            Err(n) => n - 1,
        };
        // empty sectors never occur for bosons, but stay defensive on bounds
        while n + 1 <= self.cap && self.offsets[n + 1] <= index {
            n += 1;
        }
        (n, index - self.offsets[n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimension_examples() {
        assert_eq!(basis_dimension(0, 5).unwrap(), 1); // vacuum sector
        assert_eq!(basis_dimension(2, 2).unwrap(), 3); // (2,0),(1,1),(0,2)
        assert_eq!(basis_dimension(8, 4).unwrap(), 165); // C(11,3)
    }

    #[test]
    fn dimension_overflow_is_an_error() {
        assert!(basis_dimension(1_000_000, 64).is_err());
    }

    #[test]
    fn enumeration_is_descending_lex_and_ranked() {
        let basis = OccupationBasis::new(2, 2).unwrap();
        let expect: Vec<Vec<u32>> = vec![vec![2, 0], vec![1, 1], vec![0, 2]];
        let got: Vec<Vec<u32>> = basis.states().map(|s| s.to_vec()).collect();
        assert_eq!(got, expect);
        for n in 0..6usize {
            for d in 1..5usize {
                let b = OccupationBasis::new(n, d).unwrap();
                assert_eq!(b.len(), basis_dimension(n, d).unwrap());
                for (i, s) in b.states().enumerate() {
                    assert_eq!(b.index_of(s), i, "rank mismatch at {s:?}");
                    assert_eq!(s.iter().map(|&x| x as usize).sum::<usize>(), n);
                }
            }
        }
    }

    #[test]
    fn creation_on_vacuum() {
        let vac = OccupationBasis::new(0, 2).unwrap();
        let mut psi = DVector::<Complex64>::zeros(1);
        psi[0] = Complex64::new(1.0, 0.0);
        let act = apply_ladder(&LadderMonomial::creator(0), &vac, &psi).unwrap();
        let (n, v) = act.into_vector().unwrap();
        assert_eq!(n, 1);
        // unit vector on occupation (1,0)
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v[1].norm() < 1e-15);
    }

    #[test]
    fn number_operator_action() {
        // a†_1 a_1 on occupation (3,1) = 3 * (3,1)
        let basis = OccupationBasis::new(4, 2).unwrap();
        let idx = basis.index_of(&[3, 1]);
        let mut psi = DVector::<Complex64>::zeros(basis.len());
        psi[idx] = Complex64::new(1.0, 0.0);
        let act = apply_ladder(&LadderMonomial::number(0), &basis, &psi).unwrap();
        let (n, v) = act.into_vector().unwrap();
        assert_eq!(n, 4);
        assert!((v[idx] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((total - 9.0).abs() < 1e-12);
    }

    #[test]
    fn annihilating_below_vacuum_is_flagged() {
        let vac = OccupationBasis::new(0, 2).unwrap();
        let mut psi = DVector::<Complex64>::zeros(1);
        psi[0] = Complex64::new(1.0, 0.0);
        let act = apply_ladder(&LadderMonomial::annihilator(1), &vac, &psi).unwrap();
        assert!(matches!(act, LadderAction::Annihilated));
    }

    fn random_state(basis: &OccupationBasis, seed: u64) -> DVector<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = DVector::<Complex64>::zeros(basis.len());
        for z in v.iter_mut() {
            *z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let norm = v.norm();
        v / Complex64::new(norm, 0.0)
    }

    #[test]
    fn ccr_on_random_states() {
        // || (a_i a†_j - a†_j a_i - delta_ij) psi || <= 1e-12
        let basis = OccupationBasis::new(3, 3).unwrap();
        for seed in 0..4u64 {
            let psi = random_state(&basis, seed);
            for i in 0..3 {
                for j in 0..3 {
                    let up = apply_ladder(&LadderMonomial::creator(j), &basis, &psi)
                        .unwrap()
                        .into_vector()
                        .unwrap();
                    let upb = OccupationBasis::new(up.0, 3).unwrap();
                    let ada = apply_ladder(&LadderMonomial::annihilator(i), &upb, &up.1)
                        .unwrap()
                        .into_vector()
                        .unwrap();
                    let down = apply_ladder(&LadderMonomial::annihilator(i), &basis, &psi)
                        .unwrap()
                        .into_vector()
                        .unwrap();
                    let downb = OccupationBasis::new(down.0, 3).unwrap();
                    let daa = apply_ladder(&LadderMonomial::creator(j), &downb, &down.1)
                        .unwrap()
                        .into_vector()
                        .unwrap();
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let diff = &ada.1 - &daa.1 - &psi * Complex64::new(delta, 0.0);
                    assert!(diff.norm() <= 1e-12, "CCR violated at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn adjointness_of_ladder_pairs() {
        // <phi, a†_i psi> = <a_i phi, psi>
        let basis_n = OccupationBasis::new(2, 3).unwrap();
        let basis_np = OccupationBasis::new(3, 3).unwrap();
        for seed in 0..4u64 {
            let psi = random_state(&basis_n, seed);
            let phi = random_state(&basis_np, seed + 100);
            for i in 0..3 {
                let up = apply_ladder(&LadderMonomial::creator(i), &basis_n, &psi)
                    .unwrap()
                    .into_vector()
                    .unwrap();
                let down = apply_ladder(&LadderMonomial::annihilator(i), &basis_np, &phi)
                    .unwrap()
                    .into_vector()
                    .unwrap();
                let lhs = phi.dotc(&up.1);
                let rhs = down.1.dotc(&psi);
                assert!((lhs - rhs).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn total_number_operator_is_n_identity() {
        let basis = OccupationBasis::new(4, 3).unwrap();
        let psi = random_state(&basis, 9);
        let mut acc = DVector::<Complex64>::zeros(basis.len());
        for j in 0..3 {
            let act = apply_ladder(&LadderMonomial::number(j), &basis, &psi)
                .unwrap()
                .into_vector()
                .unwrap();
            acc += act.1;
        }
        let diff = &acc - &psi * Complex64::new(4.0, 0.0);
        assert!(diff.norm() <= 1e-12);
    }

    #[test]
    fn condensate_coefficients_are_normalized() {
        let basis = OccupationBasis::new(50, 3).unwrap();
        let u = DVector::from_vec(vec![
            Complex64::new(0.5, 0.2),
            Complex64::new(-0.3, 0.6),
            Complex64::new(0.1, -0.4),
        ]);
        let u = &u / Complex64::new(u.norm(), 0.0);
        let c = condensate_coefficients(&basis, &u);
        assert!((c.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotation_by_identity_and_unitarity() {
        let basis = OccupationBasis::new(3, 2).unwrap();
        let psi = random_state(&basis, 42);
        let id = DMatrix::<Complex64>::identity(2, 2);
        let same = rotate_modes(&basis, &psi, &id).unwrap();
        assert!((&same - &psi).norm() < 1e-12);
        // a nontrivial rotation preserves the norm
        let th = 0.7f64;
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(th.cos(), 0.0),
                Complex64::new(-th.sin(), 0.1).unscale((1.0f64 + 0.01).sqrt()),
                Complex64::new(th.sin(), 0.1).unscale((1.0f64 + 0.01).sqrt()),
                Complex64::new(th.cos(), 0.0),
            ],
        );
        // orthonormalize columns (Gram-Schmidt) to make it exactly unitary
        let mut q = u;
        let c0 = q.column(0).into_owned();
        let c0 = &c0 / Complex64::new(c0.norm(), 0.0);
        let mut c1 = q.column(1).into_owned();
        let overlap = c0.dotc(&c1);
        c1 -= &c0 * overlap;
        let c1 = &c1 / Complex64::new(c1.norm(), 0.0);
        q.set_column(0, &c0);
        q.set_column(1, &c1);
        let rotated = rotate_modes(&basis, &psi, &q).unwrap();
        assert!((rotated.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_fock_indexing() {
        let f = TruncatedFockBasis::new(2, 3).unwrap();
        assert_eq!(f.len(), 1 + 2 + 3 + 4);
        let idx = f.index_of(&[1, 1]).unwrap();
        let (n, local) = f.locate(idx);
        assert_eq!(n, 2);
        assert_eq!(f.sector(2).state(local), &[1, 1]);
        assert!(f.index_of(&[3, 1]).is_none());
    }

    proptest! {
        #[test]
        fn rank_roundtrip(n in 0usize..7, d in 1usize..5, pick in 0usize..1000) {
            let b = OccupationBasis::new(n, d).unwrap();
            let i = pick % b.len();
            prop_assert_eq!(b.index_of(b.state(i)), i);
        }
    }
}
