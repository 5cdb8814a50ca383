//! Exact dense state-vector reference for small patches (d ≤ 3, ≤ 9 qubits).
//!
//! Everything here is brute force on 2^n amplitudes: logical encoding by
//! explicit stabilizer projection, coherent Ẑ rotations as diagonal phases,
//! syndrome extraction as projector branches, and logical angles read off
//! the amplitudes on the logical basis. It exists to pin down ground-truth
//! values that the Gaussian-state sampler must reproduce.

use num_complex::Complex64;

use crate::lattice::CodePatch;
use crate::tolerances::{LEAKAGE_TOL, ORACLE_BRANCH_FLOOR};
use crate::util::fold_angle;

/// Logical input states of the encoded qubit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LogicalState {
    Zero,
    One,
    /// +1 eigenstate of the logical X̂.
    XPlus,
    /// +1 eigenstate of the logical Ŷ = i X̂ Ẑ.
    YPlus,
}

/// A dense 2^n amplitude vector over the patch's data qubits; qubit q is
/// basis bit (1 << q).
pub type DenseState = Vec<Complex64>;

/// Canonical 2D correction interface: maps an X-face syndrome to a Ẑ
/// support (one bool per data qubit) with exactly that syndrome.
pub type Decode2d<'a> = dyn Fn(&[bool]) -> Vec<bool> + 'a;

/// Partial branch of a folded multi-round enumeration: the correction carried
/// into the next round, the probability and logical angle accumulated so far,
/// and the syndrome history.
type FoldedBranch = (Vec<bool>, f64, f64, Vec<Vec<bool>>);

/// One branch of an exhaustive syndrome enumeration.
#[derive(Clone, Debug)]
pub struct SyndromeBranch {
    /// Per-round X-face syndromes.
    pub syndromes: Vec<Vec<bool>>,
    /// Exact probability of observing this history.
    pub probability: f64,
    /// Residual logical rotation angle after the canonical correction,
    /// folded into (−π/2, π/2].
    pub theta_star: f64,
    /// Flattened history (round-major face bits) for table lookups.
    pub key: u64,
}

/// Exhaustive table over syndrome histories, sorted by `key`.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    pub n_x_faces: usize,
    pub rounds: usize,
    pub entries: Vec<SyndromeBranch>,
}

impl SyndromeTable {
    pub fn lookup(&self, key: u64) -> Option<&SyndromeBranch> {
        self.entries
            .binary_search_by(|e| e.key.cmp(&key))
            .ok()
            .map(|i| &self.entries[i])
    }
}

/// Flatten a syndrome history into a table key (round-major face bits).
pub fn syndrome_key(syndromes: &[Vec<bool>], n_x_faces: usize) -> u64 {
    let mut key = 0u64;
    for (j, s) in syndromes.iter().enumerate() {
        for (f, &b) in s.iter().enumerate() {
            if b {
                key |= 1u64 << (j * n_x_faces + f);
            }
        }
    }
    key
}

/// Dense simulator bound to one patch.
pub struct PatchOracle {
    pub patch: CodePatch,
    n: usize,
    dim: usize,
    x_masks: Vec<u64>,
    z_masks: Vec<u64>,
    x_logical_mask: u64,
    z_logical_mask: u64,
    zero_l: DenseState,
    one_l: DenseState,
}

fn qubits_mask(qubits: &[usize]) -> u64 {
    qubits.iter().fold(0u64, |m, &q| m | (1u64 << q))
}

impl PatchOracle {
    pub fn new(patch: &CodePatch) -> Self {
        assert!(patch.d <= 3, "dense oracle is limited to d ≤ 3 (got d={})", patch.d);
        let n = patch.n_qubits();
        let dim = 1usize << n;
        let x_masks: Vec<u64> = patch.x_faces.iter().map(|f| qubits_mask(&f.qubits)).collect();
        let z_masks: Vec<u64> = patch.z_faces.iter().map(|f| qubits_mask(&f.qubits)).collect();
        let x_logical_mask = qubits_mask(&patch.x_logical);
        let z_logical_mask = qubits_mask(&patch.z_logical);

        // |0_L⟩ ∝ ∏_f (1 + A_f)|0…0⟩: the X faces generate 2^{n_x} distinct
        // bit patterns with equal amplitude.
        let mut zero_l: DenseState = vec![Complex64::new(0.0, 0.0); dim];
        zero_l[0] = Complex64::new(1.0, 0.0);
        for &mask in &x_masks {
            let prev = zero_l.clone();
            for idx in 0..dim {
                zero_l[idx] = prev[idx] + prev[idx ^ mask as usize];
            }
        }
        let norm = zero_l.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in zero_l.iter_mut() {
            *a /= norm;
        }
        // |1_L⟩ = X̂_L |0_L⟩.
        let mut one_l = vec![Complex64::new(0.0, 0.0); dim];
        for idx in 0..dim {
            one_l[idx] = zero_l[idx ^ x_logical_mask as usize];
        }

        PatchOracle {
            patch: patch.clone(),
            n,
            dim,
            x_masks,
            z_masks,
            x_logical_mask,
            z_logical_mask,
            zero_l,
            one_l,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn n_x_faces(&self) -> usize {
        self.x_masks.len()
    }

    /// Logical basis amplitudes (a_in, b_in) of an input state.
    fn input_amplitudes(which: LogicalState) -> (Complex64, Complex64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match which {
            LogicalState::Zero => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            LogicalState::One => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            LogicalState::XPlus => (Complex64::new(s, 0.0), Complex64::new(s, 0.0)),
            LogicalState::YPlus => (Complex64::new(s, 0.0), Complex64::new(0.0, s)),
        }
    }

    pub fn encode_logical(&self, which: LogicalState) -> DenseState {
        let (a, b) = Self::input_amplitudes(which);
        (0..self.dim).map(|i| a * self.zero_l[i] + b * self.one_l[i]).collect()
    }

    /// Apply ∏_k exp(iθ_k Ẑ_k) (diagonal in the computational basis).
    pub fn apply_rotations(&self, state: &mut [Complex64], angles: &[f64]) {
        assert_eq!(angles.len(), self.n);
        for (idx, amp) in state.iter_mut().enumerate() {
            let mut t = 0.0;
            for (k, &a) in angles.iter().enumerate() {
                if (idx >> k) & 1 == 0 {
                    t += a;
                } else {
                    t -= a;
                }
            }
            *amp *= Complex64::from_polar(1.0, t);
        }
    }

    /// Project onto the X-face syndrome `s` (true = −1 outcome); returns the
    /// branch probability and leaves the state normalized (or zeroed when
    /// the branch is impossible).
    pub fn project_syndrome(&self, state: &mut [Complex64], s: &[bool]) -> f64 {
        assert_eq!(s.len(), self.x_masks.len());
        for (f, &mask) in self.x_masks.iter().enumerate() {
            let sign = if s[f] { -1.0 } else { 1.0 };
            let m = mask as usize;
            for idx in 0..self.dim {
                let other = idx ^ m;
                if idx < other {
                    let a = state[idx];
                    let b = state[other];
                    state[idx] = (a + sign * b) * 0.5;
                    state[other] = (b + sign * a) * 0.5;
                }
            }
        }
        let prob: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        if prob > ORACLE_BRANCH_FLOOR {
            let inv = 1.0 / prob.sqrt();
            for a in state.iter_mut() {
                *a *= inv;
            }
        }
        prob
    }

    /// Apply a Ẑ string with the given qubit support.
    pub fn apply_z_support(&self, state: &mut [Complex64], support: &[bool]) {
        let mask = support
            .iter()
            .enumerate()
            .fold(0usize, |m, (q, &on)| if on { m | (1 << q) } else { m });
        for (idx, amp) in state.iter_mut().enumerate() {
            if ((idx & mask).count_ones()) % 2 == 1 {
                *amp = -*amp;
            }
        }
    }

    /// ⟨∏_{q∈mask} X̂_q⟩ of a normalized state.
    pub fn x_product_expectation(&self, state: &[Complex64], mask: u64) -> f64 {
        let m = mask as usize;
        state.iter().enumerate().map(|(i, a)| (a.conj() * state[i ^ m]).re).sum()
    }

    /// ⟨∏_{q∈mask} Ẑ_q⟩ of a normalized state.
    pub fn z_product_expectation(&self, state: &[Complex64], mask: u64) -> f64 {
        state
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let sign = if ((i as u64 & mask).count_ones()) % 2 == 1 { -1.0 } else { 1.0 };
                sign * a.norm_sqr()
            })
            .sum()
    }

    pub fn x_logical_mask(&self) -> u64 {
        self.x_logical_mask
    }

    pub fn z_logical_mask(&self) -> u64 {
        self.z_logical_mask
    }

    pub fn x_face_masks(&self) -> &[u64] {
        &self.x_masks
    }

    pub fn z_face_masks(&self) -> &[u64] {
        &self.z_masks
    }

    /// Amplitudes of a state on the logical basis: (⟨0_L|ψ⟩, ⟨1_L|ψ⟩).
    pub fn logical_amplitudes(&self, state: &[Complex64]) -> (Complex64, Complex64) {
        let a = self
            .zero_l
            .iter()
            .zip(state.iter())
            .map(|(z, s)| z.conj() * s)
            .sum::<Complex64>();
        let b = self
            .one_l
            .iter()
            .zip(state.iter())
            .map(|(o, s)| o.conj() * s)
            .sum::<Complex64>();
        (a, b)
    }

    /// Residual logical Ẑ-rotation angle of `state` relative to the given
    /// input state: state ∝ exp(iθ_L Ẑ_L)|input⟩, θ_L ∈ (−π/2, π/2].
    /// Panics if the state leaked out of the code space, or if the input has
    /// a vanishing logical component (Zero/One inputs carry no phase info).
    pub fn logical_angle(&self, input: LogicalState, state: &[Complex64]) -> f64 {
        let (a_in, b_in) = Self::input_amplitudes(input);
        assert!(
            a_in.norm() > 0.0 && b_in.norm() > 0.0,
            "logical angle undefined for Ẑ-basis inputs"
        );
        let (a, b) = self.logical_amplitudes(state);
        let norm: f64 = state.iter().map(|x| x.norm_sqr()).sum();
        let leak = (norm - a.norm_sqr() - b.norm_sqr()).abs();
        assert!(leak < LEAKAGE_TOL, "state leaked out of the code space by {leak:e}");
        let r = (a / a_in) * (b / b_in).conj();
        0.5 * r.arg()
    }

    /// Single round from a fresh logical input: rotate by per-qubit angles,
    /// project onto syndrome `s`, apply `correction`, and read the logical
    /// angle. Returns (branch probability, θ_L); θ_L is NaN for impossible
    /// branches.
    pub fn single_round_angle(
        &self,
        angles: &[f64],
        s: &[bool],
        correction: &[bool],
        input: LogicalState,
    ) -> (f64, f64) {
        assert_eq!(
            self.patch.syndrome_of_support(correction),
            s,
            "correction does not produce the requested syndrome"
        );
        let mut state = self.encode_logical(input);
        self.apply_rotations(&mut state, angles);
        let prob = self.project_syndrome(&mut state, s);
        if prob <= ORACLE_BRANCH_FLOOR {
            return (prob, f64::NAN);
        }
        self.apply_z_support(&mut state, correction);
        (prob, self.logical_angle(input, state.as_slice()))
    }

    /// Exhaustive multi-round table by direct evolution: the physical state
    /// is rotated and projected round after round, and θ* is read after
    /// applying the canonical correction of the final-round syndrome.
    pub fn enumerate_direct(&self, theta: f64, rounds: usize, decode2d: &Decode2d) -> SyndromeTable {
        assert!((1..=3).contains(&rounds), "dense enumeration supports 1..=3 rounds");
        let n_x = self.x_masks.len();
        let angles = vec![theta; self.n];
        let mut entries = Vec::new();
        let init = self.encode_logical(LogicalState::XPlus);
        let mut stack: Vec<(DenseState, f64, Vec<Vec<bool>>)> = vec![(init, 1.0, Vec::new())];
        while let Some((state, prob, hist)) = stack.pop() {
            let mut rotated = state;
            self.apply_rotations(&mut rotated, &angles);
            for smask in 0..(1u32 << n_x) {
                let s: Vec<bool> = (0..n_x).map(|f| (smask >> f) & 1 == 1).collect();
                let mut branch = rotated.clone();
                let p = self.project_syndrome(&mut branch, &s) * prob;
                if p <= ORACLE_BRANCH_FLOOR {
                    continue;
                }
                let mut h = hist.clone();
                h.push(s);
                if h.len() == rounds {
                    let correction = decode2d(h.last().unwrap());
                    assert_eq!(
                        self.patch.syndrome_of_support(&correction),
                        *h.last().unwrap(),
                        "canonical correction syndrome mismatch"
                    );
                    self.apply_z_support(&mut branch, &correction);
                    let theta_star = self.logical_angle(LogicalState::XPlus, &branch);
                    let key = syndrome_key(&h, n_x);
                    entries.push(SyndromeBranch { syndromes: h, probability: p, theta_star, key });
                } else {
                    stack.push((branch, p, h));
                }
            }
        }
        entries.sort_by_key(|e| e.key);
        SyndromeTable { n_x_faces: n_x, rounds, entries }
    }

    /// Exhaustive multi-round table by the single-round decomposition: round
    /// j is a fresh single round whose angles fold in the previous round's
    /// canonical correction as a +π/2 shift on its support, and
    /// θ* = fold(Σ_j θ_L^j).
    pub fn enumerate_folded(&self, theta: f64, rounds: usize, decode2d: &Decode2d) -> SyndromeTable {
        assert!(rounds >= 1, "at least one round");
        let n_x = self.x_masks.len();
        let mut entries = Vec::new();
        let no_corr = vec![false; self.n];
        let mut stack: Vec<FoldedBranch> = vec![(no_corr, 1.0, 0.0, Vec::new())];
        while let Some((prev_corr, prob, theta_sum, hist)) = stack.pop() {
            let angles: Vec<f64> = (0..self.n)
                .map(|q| theta + if prev_corr[q] { std::f64::consts::FRAC_PI_2 } else { 0.0 })
                .collect();
            for smask in 0..(1u32 << n_x) {
                let s: Vec<bool> = (0..n_x).map(|f| (smask >> f) & 1 == 1).collect();
                let correction = decode2d(&s);
                let (pj, tj) = self.single_round_angle(&angles, &s, &correction, LogicalState::XPlus);
                let p = prob * pj;
                if p <= ORACLE_BRANCH_FLOOR {
                    continue;
                }
                let mut h = hist.clone();
                h.push(s);
                if h.len() == rounds {
                    let key = syndrome_key(&h, n_x);
                    entries.push(SyndromeBranch {
                        syndromes: h,
                        probability: p,
                        theta_star: fold_angle(theta_sum + tj),
                        key,
                    });
                } else {
                    stack.push((correction, p, theta_sum + tj, h));
                }
            }
        }
        entries.sort_by_key(|e| e.key);
        SyndromeTable { n_x_faces: n_x, rounds, entries }
    }
}

/// Deterministic minimum-weight Ẑ correction by exhaustive search (d ≤ 3):
/// the lowest-weight support with the requested X-face syndrome, ties broken
/// by the smallest bitmask. An independent stand-in for matching-based
/// canonical corrections in oracle-internal tests.
pub fn brute_force_min_correction(patch: &CodePatch, s: &[bool]) -> Vec<bool> {
    let n = patch.n_qubits();
    assert!(n <= 16, "brute-force correction is exponential in qubit count");
    let mut best: Option<(u32, usize)> = None;
    for mask in 0..(1usize << n) {
        let support: Vec<bool> = (0..n).map(|q| (mask >> q) & 1 == 1).collect();
        if patch.syndrome_of_support(&support) == s {
            let w = mask.count_ones();
            if best.is_none_or(|(bw, _)| w < bw) {
                best = Some((w, mask));
            }
        }
    }
    let (_, mask) = best.expect("every X-face syndrome has a Ẑ preimage");
    (0..n).map(|q| (mask >> q) & 1 == 1).collect()
}
