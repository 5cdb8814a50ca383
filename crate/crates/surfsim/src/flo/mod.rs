//! Covariance-matrix evolution for fermionic Gaussian (matchgate) states.
//!
//! A pure Gaussian state of `n` Majorana operators ĉ_0..ĉ_{n−1} is fully
//! described by the real antisymmetric matrix M_jk = ⟨i ĉ_j ĉ_k⟩ (j ≠ k),
//! which is orthogonal exactly when the state is pure. Two operations are
//! supported, both exact:
//!
//! * `apply_rotation(θ, p, q)` — conjugation by exp(θ ĉ_p ĉ_q), a Givens
//!   rotation by 2θ of rows/columns p and q;
//! * `project_plus(p, q)` — projective measurement of i ĉ_p ĉ_q forced to
//!   outcome +1 (use swapped indices for −1), via a rank-2 update.
//!
//! States whose stabilized pairs partition the modes (product states) keep
//! most of M in a frozen ±1 pattern; the optional active-set mode exploits
//! this by restricting every row/column loop to the indices that can hold
//! nonzero off-pattern entries. Both modes perform the same arithmetic on
//! the same entries, so their results are identical, not merely close.

pub mod pfaffian;

use crate::tolerances::{MEAS_PROB_FLOOR, PURITY_TOL};
use thiserror::Error;

const SENTINEL: usize = usize::MAX;
/// Number of rotations/projections between self-checks of the active block.
const HYGIENE_INTERVAL: usize = 1000;

/// (cos 2θ, sin 2θ) with exact values when θ is an exact multiple of π/2.
///
/// A rotation by a multiple of π/2 permutes stabilizer states among
/// themselves; snapping the trig pair to (±1, 0) keeps every covariance
/// entry an exact dyadic rational along such evolutions, so quantities that
/// cancel algebraically (e.g. a logical angle at θ = 0 with π/2 frame
/// shifts folded in) cancel exactly in floating point instead of leaving
/// ~1e-16 residue from sin(π) ≠ 0.
fn rotation_trig(theta: f64) -> (f64, f64) {
    let quarter_turns = theta / std::f64::consts::FRAC_PI_2;
    if quarter_turns == quarter_turns.trunc() && quarter_turns.abs() < 1e15 {
        let k = (quarter_turns as i64).rem_euclid(2);
        let c = if k == 0 { 1.0 } else { -1.0 };
        return (c, 0.0);
    }
    ((2.0 * theta).cos(), (2.0 * theta).sin())
}

#[derive(Debug, Error, PartialEq)]
pub enum FloError {
    /// A forced measurement outcome had probability below `MEAS_PROB_FLOOR`.
    #[error("forced outcome of pair ({p}, {q}) has vanishing probability {prob:.3e}")]
    ImpossibleOutcome { p: usize, q: usize, prob: f64 },
    /// The requested stabilized pairs do not partition the mode indices.
    #[error("stabilized pairs must cover every Majorana index exactly once")]
    InvalidPairing,
}

#[derive(Clone)]
pub struct CovarianceMatrix {
    n: usize,
    m: Vec<f64>,
    /// When true, loops run over `active` only; when false, over all indices.
    track_active: bool,
    active: Vec<usize>,
    pos_in_active: Vec<usize>,
    /// For a frozen index, the position of its ±1 partner entry.
    partner: Vec<usize>,
    ops_since_check: usize,
    scratch_k: Vec<f64>,
    scratch_l: Vec<f64>,
}

impl CovarianceMatrix {
    /// State stabilized by i ĉ_p ĉ_q = +1 for every `(p, q)` in `pairs`.
    /// The pairs must partition `0..n_majorana`.
    pub fn from_stabilized_pairs(
        n_majorana: usize,
        pairs: &[(usize, usize)],
        track_active: bool,
    ) -> Result<Self, FloError> {
        let mut cov = CovarianceMatrix {
            n: n_majorana,
            m: vec![0.0; n_majorana * n_majorana],
            track_active,
            active: Vec::new(),
            pos_in_active: vec![SENTINEL; n_majorana],
            partner: vec![SENTINEL; n_majorana],
            ops_since_check: 0,
            scratch_k: vec![0.0; n_majorana],
            scratch_l: vec![0.0; n_majorana],
        };
        cov.reset_to_pairs(pairs)?;
        Ok(cov)
    }

    /// Copy the full state of `src` into `self`, reusing allocations.
    /// Both matrices must have the same mode count.
    pub fn assign_from(&mut self, src: &Self) {
        assert_eq!(self.n, src.n, "mode count mismatch");
        self.m.clone_from(&src.m);
        self.track_active = src.track_active;
        self.active.clone_from(&src.active);
        self.pos_in_active.clone_from(&src.pos_in_active);
        self.partner.clone_from(&src.partner);
        self.ops_since_check = src.ops_since_check;
    }

    /// Reinitialize in place to the product state stabilized by `pairs`,
    /// reusing the allocation. Cost O(n + w²) in active mode, O(n²) in full
    /// mode, where w is the current active-set size.
    pub fn reset_to_pairs(&mut self, pairs: &[(usize, usize)]) -> Result<(), FloError> {
        if pairs.len() * 2 != self.n {
            return Err(FloError::InvalidPairing);
        }
        let mut seen = vec![false; self.n];
        for &(p, q) in pairs {
            if p >= self.n || q >= self.n || p == q || seen[p] || seen[q] {
                return Err(FloError::InvalidPairing);
            }
            seen[p] = true;
            seen[q] = true;
        }

        if self.track_active && self.active.len() < self.n {
            // Clear the active block.
            for i in 0..self.active.len() {
                let j = self.active[i];
                for i2 in 0..self.active.len() {
                    let k = self.active[i2];
                    self.m[j * self.n + k] = 0.0;
                }
            }
            // Clear the frozen ±1 entries.
            for j in 0..self.n {
                let pj = self.partner[j];
                if pj != SENTINEL {
                    self.m[j * self.n + pj] = 0.0;
                }
            }
        } else {
            self.m.fill(0.0);
        }

        self.active.clear();
        self.pos_in_active.fill(SENTINEL);
        self.partner.fill(SENTINEL);
        self.ops_since_check = 0;

        for &(p, q) in pairs {
            self.m[p * self.n + q] = 1.0;
            self.m[q * self.n + p] = -1.0;
        }
        if self.track_active {
            for &(p, q) in pairs {
                self.partner[p] = q;
                self.partner[q] = p;
            }
        } else {
            for j in 0..self.n {
                self.pos_in_active[j] = j;
                self.active.push(j);
            }
        }
        Ok(())
    }

    pub fn n_majorana(&self) -> usize {
        self.n
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.m[j * self.n + k]
    }

    /// Probability that measuring i ĉ_p ĉ_q yields +1.
    pub fn probability_plus(&self, p: usize, q: usize) -> f64 {
        (1.0 + self.m[p * self.n + q]) / 2.0
    }

    fn activate(&mut self, j: usize) {
        if !self.track_active || self.pos_in_active[j] != SENTINEL {
            return;
        }
        let mate = self.partner[j];
        debug_assert_ne!(mate, SENTINEL, "index neither active nor frozen");
        for idx in [j, mate] {
            self.partner[idx] = SENTINEL;
            self.pos_in_active[idx] = self.active.len();
            self.active.push(idx);
        }
    }

    fn freeze_pair(&mut self, p: usize, q: usize) {
        if !self.track_active {
            return;
        }
        for idx in [p, q] {
            let pos = self.pos_in_active[idx];
            debug_assert_ne!(pos, SENTINEL);
            let last = *self.active.last().unwrap();
            self.active.swap_remove(pos);
            if last != idx {
                self.pos_in_active[last] = pos;
            }
            self.pos_in_active[idx] = SENTINEL;
        }
        self.partner[p] = q;
        self.partner[q] = p;
    }

    /// Conjugate the state by exp(θ ĉ_p ĉ_q): a Givens rotation by 2θ of
    /// rows and columns p, q. Exact for any θ; θ = 0 is a no-op.
    pub fn apply_rotation(&mut self, theta: f64, p: usize, q: usize) {
        debug_assert_ne!(p, q);
        if theta == 0.0 {
            return;
        }
        self.activate(p);
        self.activate(q);
        let (c, s) = rotation_trig(theta);
        let n = self.n;
        for i in 0..self.active.len() {
            let k = self.active[i];
            let mp = self.m[p * n + k];
            let mq = self.m[q * n + k];
            self.m[p * n + k] = c * mp + s * mq;
            self.m[q * n + k] = -s * mp + c * mq;
        }
        for i in 0..self.active.len() {
            let k = self.active[i];
            let mp = self.m[k * n + p];
            let mq = self.m[k * n + q];
            self.m[k * n + p] = c * mp + s * mq;
            self.m[k * n + q] = -s * mp + c * mq;
        }
        self.ops_since_check += 1;
        self.maybe_hygiene();
    }

    /// Project onto the +1 eigenspace of i ĉ_p ĉ_q and renormalize.
    /// Returns the probability the outcome had; errors if it vanishes.
    /// For the −1 outcome call with p and q swapped.
    pub fn project_plus(&mut self, p: usize, q: usize) -> Result<f64, FloError> {
        debug_assert_ne!(p, q);
        self.activate(p);
        self.activate(q);
        let n = self.n;
        let prob = (1.0 + self.m[p * n + q]) / 2.0;
        if prob < MEAS_PROB_FLOOR {
            return Err(FloError::ImpossibleOutcome { p, q, prob });
        }
        for i in 0..self.active.len() {
            let k = self.active[i];
            self.scratch_k[k] = self.m[p * n + k];
            self.scratch_l[k] = self.m[q * n + k];
        }
        let inv = 1.0 / (2.0 * prob);
        for i in 0..self.active.len() {
            let j = self.active[i];
            if j == p || j == q {
                continue;
            }
            let kj = self.scratch_k[j];
            let lj = self.scratch_l[j];
            if kj == 0.0 && lj == 0.0 {
                continue;
            }
            let row = j * n;
            for i2 in 0..self.active.len() {
                let k = self.active[i2];
                self.m[row + k] += (lj * self.scratch_k[k] - kj * self.scratch_l[k]) * inv;
            }
        }
        for i in 0..self.active.len() {
            let k = self.active[i];
            self.m[p * n + k] = 0.0;
            self.m[q * n + k] = 0.0;
            self.m[k * n + p] = 0.0;
            self.m[k * n + q] = 0.0;
        }
        self.m[p * n + q] = 1.0;
        self.m[q * n + p] = -1.0;
        self.freeze_pair(p, q);
        self.ops_since_check += 1;
        self.maybe_hygiene();
        Ok(prob)
    }

    /// Project i ĉ_p ĉ_q onto the given outcome (+1 for `plus`), returning
    /// the probability that outcome had.
    pub fn measure_forced(&mut self, p: usize, q: usize, plus: bool) -> Result<f64, FloError> {
        if plus {
            self.project_plus(p, q)
        } else {
            self.project_plus(q, p)
        }
    }

    /// Pfaffian of the restriction of M to `indices`, in the given order.
    /// For distinct indices j_1..j_{2p} this equals i^p ⟨ĉ_{j1} ⋯ ĉ_{j2p}⟩.
    pub fn pfaffian_expectation(&self, indices: &[usize]) -> f64 {
        let k = indices.len();
        let mut sub = vec![0.0; k * k];
        for (a, &ja) in indices.iter().enumerate() {
            for (b, &jb) in indices.iter().enumerate() {
                sub[a * k + b] = self.m[ja * self.n + jb];
            }
        }
        pfaffian::pfaffian_in_place(&mut sub, k)
    }

    /// max |(M Mᵀ − I)_jk| over the full matrix — 0 for a pure state.
    pub fn purity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let mut g = 0.0;
                for l in 0..n {
                    g += self.m[j * n + l] * self.m[k * n + l];
                }
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    fn maybe_hygiene(&mut self) {
        if self.ops_since_check < HYGIENE_INTERVAL {
            return;
        }
        self.ops_since_check = 0;
        let w = self.active.len();
        if w == 0 {
            return;
        }
        let n = self.n;
        // Exact antisymmetry restoration on the active block.
        for a in 0..w {
            let j = self.active[a];
            self.m[j * n + j] = 0.0;
            for b in (a + 1)..w {
                let k = self.active[b];
                let avg = (self.m[j * n + k] - self.m[k * n + j]) / 2.0;
                self.m[j * n + k] = avg;
                self.m[k * n + j] = -avg;
            }
        }
        // Orthogonality drift of the active block. (Frozen rows are exact.)
        let mut block = vec![0.0; w * w];
        for a in 0..w {
            for b in 0..w {
                block[a * w + b] = self.m[self.active[a] * n + self.active[b]];
            }
        }
        let drift = orthogonality_defect(&block, w);
        if drift > PURITY_TOL {
            log::warn!(
                "covariance drift {drift:.3e} on {w}-index active block; re-orthogonalizing"
            );
            for _ in 0..4 {
                let mut inv = block.clone();
                if !invert_in_place(&mut inv, w) {
                    log::warn!("active block numerically singular; skipping re-orthogonalization");
                    return;
                }
                // Newton step toward the orthogonal polar factor; for an
                // antisymmetric X, X^{-T} = −X^{-1}.
                for i in 0..w * w {
                    block[i] = 0.5 * (block[i] - inv[i]);
                }
                // Keep the iterate exactly antisymmetric.
                for a in 0..w {
                    block[a * w + a] = 0.0;
                    for b in (a + 1)..w {
                        let avg = (block[a * w + b] - block[b * w + a]) / 2.0;
                        block[a * w + b] = avg;
                        block[b * w + a] = -avg;
                    }
                }
                if orthogonality_defect(&block, w) < 1e-14 {
                    break;
                }
            }
            for a in 0..w {
                for b in 0..w {
                    self.m[self.active[a] * n + self.active[b]] = block[a * w + b];
                }
            }
        }
    }
}

fn orthogonality_defect(block: &[f64], w: usize) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..w {
        for b in 0..w {
            let mut g = 0.0;
            for l in 0..w {
                g += block[a * w + l] * block[b * w + l];
            }
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Gauss–Jordan inversion with partial pivoting. Returns false if singular.
fn invert_in_place(a: &mut [f64], n: usize) -> bool {
    let mut aug = vec![0.0; n * 2 * n];
    for i in 0..n {
        for j in 0..n {
            aug[i * 2 * n + j] = a[i * n + j];
        }
        aug[i * 2 * n + n + i] = 1.0;
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = aug[col * 2 * n + col].abs();
        for r in (col + 1)..n {
            let v = aug[r * 2 * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return false;
        }
        if piv != col {
            for j in 0..2 * n {
                aug.swap(col * 2 * n + j, piv * 2 * n + j);
            }
        }
        let d = aug[col * 2 * n + col];
        for j in 0..2 * n {
            aug[col * 2 * n + j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r * 2 * n + col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        aug[r * 2 * n + j] -= f * aug[col * 2 * n + j];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = aug[i * 2 * n + n + j];
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// A single four-Majorana cell stabilized as i ĉ_0 ĉ_1 = i ĉ_2 ĉ_3 = +1,
    /// rotated by exp(θ ĉ_2 ĉ_1). Expected entries follow from the Givens
    /// action and were cross-checked against single-qubit state evolution:
    /// M01 = cos 2θ, M02 = sin 2θ, M13 = −sin 2θ, M23 = cos 2θ.
    fn rotated_cell(theta: f64, track_active: bool) -> CovarianceMatrix {
        let mut cov =
            CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1), (2, 3)], track_active).unwrap();
        cov.apply_rotation(theta, 2, 1);
        cov
    }

    #[test]
    fn rejects_bad_pairings() {
        assert!(CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1)], false).is_err());
        assert!(CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1), (1, 2)], false).is_err());
        assert!(CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1), (2, 2)], false).is_err());
        assert!(CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1), (2, 4)], false).is_err());
    }

    #[test]
    fn initial_state_is_pure_with_requested_pairs() {
        let cov = CovarianceMatrix::from_stabilized_pairs(6, &[(0, 3), (1, 4), (2, 5)], false)
            .unwrap();
        assert_eq!(cov.entry(0, 3), 1.0);
        assert_eq!(cov.entry(3, 0), -1.0);
        assert_eq!(cov.entry(1, 4), 1.0);
        assert_eq!(cov.entry(0, 1), 0.0);
        assert!(cov.purity_defect() < 1e-15);
    }

    #[test]
    fn rotation_matches_hand_computed_cell() {
        let theta = 0.37;
        for track in [false, true] {
            let cov = rotated_cell(theta, track);
            let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
            assert_abs_diff_eq!(cov.entry(0, 1), c, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(0, 2), s, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(1, 3), -s, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(2, 3), c, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(0, 3), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(1, 2), 0.0, epsilon = 1e-15);
            assert!(cov.purity_defect() < 1e-14);
        }
    }

    #[test]
    fn rotation_roundtrip_is_identity() {
        let mut cov = rotated_cell(0.81, false);
        cov.apply_rotation(-0.81, 2, 1);
        assert_abs_diff_eq!(cov.entry(0, 1), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cov.entry(2, 3), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cov.entry(0, 2), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn measurement_collapses_partner_pair() {
        // After rotating and measuring i ĉ_0 ĉ_1 = +1, the leftover pair
        // (2,3) must snap back to +1: the product of the two pair operators
        // is conserved and was +1 initially.
        let theta = 0.59;
        for track in [false, true] {
            let mut cov = rotated_cell(theta, track);
            let prob = cov.project_plus(0, 1).unwrap();
            assert_abs_diff_eq!(prob, (1.0 + (2.0 * theta).cos()) / 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(0, 1), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(cov.entry(2, 3), 1.0, epsilon = 1e-12);
            assert!(cov.purity_defect() < 1e-12);
        }
    }

    #[test]
    fn minus_outcome_flips_partner_pair() {
        let theta = 0.59;
        let mut cov = rotated_cell(theta, false);
        let prob = cov.measure_forced(0, 1, false).unwrap();
        assert_abs_diff_eq!(prob, (1.0 - (2.0 * theta).cos()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cov.entry(0, 1), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cov.entry(2, 3), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn impossible_outcome_is_an_error() {
        let mut cov = rotated_cell(std::f64::consts::FRAC_PI_2, false);
        // cos 2θ = −1, so the +1 outcome of i ĉ_0 ĉ_1 is impossible.
        let err = cov.project_plus(0, 1).unwrap_err();
        match err {
            FloError::ImpossibleOutcome { p: 0, q: 1, prob } => assert!(prob < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn active_and_full_modes_agree_exactly() {
        // A longer interleaving across three cells, including re-measuring
        // frozen pairs, must produce identical matrices in both modes.
        let pairs = [(0, 4), (1, 5), (2, 3), (6, 9), (7, 8), (10, 11)];
        let mut full = CovarianceMatrix::from_stabilized_pairs(12, &pairs, false).unwrap();
        let mut act = CovarianceMatrix::from_stabilized_pairs(12, &pairs, true).unwrap();
        let script: &[(f64, usize, usize)] =
            &[(0.3, 2, 1), (0.7, 5, 6), (-0.2, 8, 9), (0.11, 0, 10), (0.5, 4, 7)];
        for &(th, p, q) in script {
            full.apply_rotation(th, p, q);
            act.apply_rotation(th, p, q);
        }
        for &(p, q, plus) in &[(0usize, 1usize, true), (4, 5, false), (2, 3, true)] {
            let pf = full.measure_forced(p, q, plus).unwrap();
            let pa = act.measure_forced(p, q, plus).unwrap();
            assert_eq!(pf, pa);
        }
        full.apply_rotation(0.9, 1, 6);
        act.apply_rotation(0.9, 1, 6);
        for j in 0..12 {
            for k in 0..12 {
                assert!(
                    full.entry(j, k) == act.entry(j, k),
                    "entry ({j},{k}): {} vs {}",
                    full.entry(j, k),
                    act.entry(j, k)
                );
            }
        }
    }

    #[test]
    fn reset_reuses_allocation_and_state() {
        let pairs_a = [(0, 1), (2, 3), (4, 5)];
        let pairs_b = [(0, 3), (1, 4), (2, 5)];
        for track in [false, true] {
            let mut cov = CovarianceMatrix::from_stabilized_pairs(6, &pairs_a, track).unwrap();
            cov.apply_rotation(0.4, 1, 2);
            cov.project_plus(0, 1).unwrap();
            cov.reset_to_pairs(&pairs_b).unwrap();
            let fresh = CovarianceMatrix::from_stabilized_pairs(6, &pairs_b, track).unwrap();
            for j in 0..6 {
                for k in 0..6 {
                    assert_eq!(cov.entry(j, k), fresh.entry(j, k));
                }
            }
        }
    }

    #[test]
    fn pfaffian_expectation_obeys_wick_factorization() {
        let cov = CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1), (2, 3)], false).unwrap();
        // ⟨(i ĉ_0 ĉ_1)(i ĉ_2 ĉ_3)⟩ = −⟨ĉ_0 ĉ_1 ĉ_2 ĉ_3⟩ = product of pairs = 1,
        // so Pf over (0,1,2,3) = i²⟨ĉ_0ĉ_1ĉ_2ĉ_3⟩ = 1.
        assert_abs_diff_eq!(cov.pfaffian_expectation(&[0, 1, 2, 3]), 1.0, epsilon = 1e-15);
        // Odd-ordered restriction flips sign with the permutation.
        assert_abs_diff_eq!(cov.pfaffian_expectation(&[1, 0, 2, 3]), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cov.pfaffian_expectation(&[0, 2]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn purity_survives_long_random_walks() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 16;
        let pairs: Vec<(usize, usize)> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        let mut cov = CovarianceMatrix::from_stabilized_pairs(n, &pairs, false).unwrap();
        for _ in 0..500 {
            let p = rng.gen_range(0..n);
            let mut q = rng.gen_range(0..n);
            while q == p {
                q = rng.gen_range(0..n);
            }
            if rng.gen_bool(0.8) {
                cov.apply_rotation(rng.gen_range(-1.5..1.5), p, q);
            } else {
                let plus = rng.gen_bool(cov.probability_plus(p, q).clamp(0.0, 1.0));
                // Forced outcome matching the draw always has prob > 0.
                cov.measure_forced(p, q, plus).unwrap();
            }
        }
        assert!(cov.purity_defect() < 1e-10, "drift {}", cov.purity_defect());
    }

    #[test]
    fn quarter_turn_rotations_are_exact() {
        use std::f64::consts::FRAC_PI_2;
        let mut cov =
            CovarianceMatrix::from_stabilized_pairs(4, &[(0, 1), (2, 3)], false).unwrap();
        // θ = π/2 sends i ĉ0 ĉ1 to itself with a sign flip of both rows:
        // entries must stay exactly ±1/0, with no sin(π) ≈ 1.2e-16 residue.
        cov.apply_rotation(FRAC_PI_2, 0, 2);
        for j in 0..4 {
            for k in 0..4 {
                let v = cov.entry(j, k);
                assert!(
                    v == 0.0 || v == 1.0 || v == -1.0,
                    "entry ({j},{k}) = {v:e} not snapped"
                );
            }
        }
        // A full turn is exactly the identity.
        let before = cov.clone();
        cov.apply_rotation(2.0 * std::f64::consts::PI, 1, 3);
        for j in 0..4 {
            for k in 0..4 {
                assert_eq!(cov.entry(j, k), before.entry(j, k));
            }
        }
        // Generic angles still use real trig.
        let (c, s) = super::rotation_trig(0.3);
        assert_abs_diff_eq!(c, 0.6_f64.cos(), epsilon = 0.0);
        assert_abs_diff_eq!(s, 0.6_f64.sin(), epsilon = 0.0);
    }

    #[test]
    fn assign_from_restores_state_in_place() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 12;
        let pairs: Vec<(usize, usize)> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        for track in [false, true] {
            let mut a = CovarianceMatrix::from_stabilized_pairs(n, &pairs, track).unwrap();
            for _ in 0..40 {
                let p = rng.gen_range(0..n);
                let mut q = rng.gen_range(0..n);
                while q == p {
                    q = rng.gen_range(0..n);
                }
                a.apply_rotation(rng.gen_range(-1.0..1.0), p, q);
            }
            let mut b = CovarianceMatrix::from_stabilized_pairs(n, &pairs, track).unwrap();
            b.assign_from(&a);
            // Diverge `a`, then restore it from the snapshot and check the
            // two evolve identically afterwards.
            a.apply_rotation(0.7, 0, 5);
            a.assign_from(&b);
            a.apply_rotation(0.2, 1, 2);
            b.apply_rotation(0.2, 1, 2);
            let pa = a.measure_forced(0, 1, true).unwrap();
            let pb = b.measure_forced(0, 1, true).unwrap();
            assert_eq!(pa, pb);
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(a.entry(j, k), b.entry(j, k), "({j},{k}) track={track}");
                }
            }
        }
    }
}
