//! Syndrome sampling and logical-angle extraction for coherent Z rotations.
//!
//! One measurement round rotates every data qubit by a per-qubit angle,
//! then reads all X-type checks. The sampler realizes this on the Gaussian
//! (pairing-state) representation: per qubit, the step operator is the
//! gauge projection onto its four-Majorana +1 sector followed by the X
//! measurement, which factors into two pair projections (X, then the
//! gauge companion forced to the same outcome). The outcome is drawn from
//! the gauge-normalized conditional
//!     P(m) ∝ (1 + m⟨X̂⟩ + m⟨ŜX̂⟩ + ⟨X̂ŜX̂⟩)/4,
//! whose normalizer (1 + ⟨X̂ŜX̂⟩)/2 is that step's gauge-sector
//! probability. The product of the normalizers over a round is exactly
//! 2^(1−n) on every branch — the projections commute with the rotations
//! and measurements, so they can be pulled out front — and this identity
//! is asserted per shot; it certifies the conditionals are normalized and
//! the sampled X outcomes are an unbiased sample of the qubit-level
//! measurement.
//!
//! The residual logical angle θ_L of a syndrome branch is recovered from
//! four forced runs: with the correction folded into the angles as π/2
//! offsets, the run forcing every outcome to +1 has probability ∝
//! P(s)·cos²θ_L from a |+_L⟩ start, and inserting a logical Z (an extra
//! π/2 on the top row) turns the cosine into a sine; starting from the
//! +1 eigenstate of the logical Y instead yields ∝ P(s)·(1 ± sin 2θ_L)/2.
//! The two balance ratios give cos 2θ_L and sin 2θ_L, and θ_L follows
//! from atan2. Run probabilities are kept as exactly rescaled products so
//! branches that agree algebraically (e.g. at θ = 0) cancel exactly.

use crate::flo::CovarianceMatrix;
use crate::lattice::network::{
    build_network, sx_pair, x_pair, z_rotation_pair, LogicalInit, MajoranaNetwork,
};
use crate::lattice::{build_patch, CodePatch};
use crate::tolerances::{GAUGE_HALF_TOL, MEAS_PROB_FLOOR};
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, LN_2};

/// Maps an X-face syndrome to a Z support (one bool per data qubit) whose
/// syndrome is exactly the input. Shared by the sampler and the decoders.
pub type Correct2d<'a> = dyn Fn(&[bool]) -> Vec<bool> + 'a;

/// 2^511; mantissas are renormalized into [2^-512, 1] as they shrink.
const RESCALE_FLOOR: f64 = f64::from_bits((1023u64 - 512) << 52);
const RESCALE_UP: f64 = f64::from_bits((1023u64 + 512) << 52);

/// A nonnegative product kept as `m · 2^e` with `m ∈ [2^-512, 1]` (or
/// exactly 0). Multiplying by a power of two is exact, so products of
/// dyadic probabilities — which arise whenever every rotation angle is a
/// multiple of π/2 — are represented exactly at any magnitude.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    m: f64,
    e: i64,
}

impl Scaled {
    const ONE: Scaled = Scaled { m: 1.0, e: 0 };
    const DEAD: Scaled = Scaled { m: 0.0, e: 0 };

    fn is_dead(self) -> bool {
        self.m == 0.0
    }

    fn mul(&mut self, p: f64) {
        debug_assert!(p > 0.0 && p <= 1.0 + 1e-9, "probability {p}");
        self.m *= p.min(1.0);
        if self.m < RESCALE_FLOOR {
            self.m *= RESCALE_UP;
            self.e -= 512;
        }
    }

    fn ln(self) -> f64 {
        if self.is_dead() {
            f64::NEG_INFINITY
        } else {
            self.m.ln() + self.e as f64 * LN_2
        }
    }
}

/// 2^k for |k| < 1023, exactly.
fn pow2(k: i64) -> f64 {
    debug_assert!(k.abs() < 1023);
    f64::from_bits(((1023 + k) as u64) << 52)
}

/// (A − B)/(A + B) for scaled nonnegative A, B; NaN when both are zero.
/// Exact-zero preserving: equal inputs give exactly 0.0.
fn balance_ratio(a: Scaled, b: Scaled) -> f64 {
    match (a.is_dead(), b.is_dead()) {
        (true, true) => f64::NAN,
        (false, true) => 1.0,
        (true, false) => -1.0,
        (false, false) => {
            let k = a.e - b.e;
            // Mantissas lie in [2^-512, 1], so |k| ≥ 612 forces a ratio
            // beyond 2^100 and the balance is ±1 to under f64 resolution.
            if k >= 612 {
                1.0
            } else if k <= -612 {
                -1.0
            } else if k >= 0 {
                let ma = a.m * pow2(k);
                (ma - b.m) / (ma + b.m)
            } else {
                let mb = b.m * pow2(-k);
                (a.m - mb) / (a.m + mb)
            }
        }
    }
}

/// ln(e^a + e^b), tolerating -∞ inputs.
fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Trace of one sampled multi-round shot.
#[derive(Clone, Debug)]
pub struct RoundsRecord {
    /// Per round, the per-qubit X measurement outcomes (true = −1).
    pub m_rounds: Vec<Vec<bool>>,
    /// Per round, the X-face syndrome (true = defect).
    pub syndromes: Vec<Vec<bool>>,
    /// Per round, the residual logical angle of that round's branch.
    pub theta_rounds: Vec<f64>,
    /// Accumulated logical angle Σ_j θ_j (not folded).
    pub theta_star: f64,
    /// Canonical correction of the final round's syndrome.
    pub final_correction: Vec<bool>,
}

/// Sampler for repeated stabilizer rounds under coherent Z rotations,
/// holding the patch geometry, its Majorana network, and two reusable
/// covariance-matrix buffers (working copy + fork point).
pub struct CoherentSampler {
    patch: CodePatch,
    net: MajoranaNetwork,
    cov: CovarianceMatrix,
    fork: CovarianceMatrix,
    plus_init: Vec<(usize, usize)>,
    y_init: Vec<(usize, usize)>,
}

impl CoherentSampler {
    pub fn new(d: usize) -> Self {
        let patch = build_patch(d);
        let net = build_network(&patch);
        let plus_init = net.stabilized_pairs(LogicalInit::XPlus);
        let y_init = net.stabilized_pairs(LogicalInit::YPlus);
        let cov = CovarianceMatrix::from_stabilized_pairs(net.n_majorana, &plus_init, true)
            .expect("network pairing partitions the Majorana indices");
        let fork = cov.clone();
        CoherentSampler {
            patch,
            net,
            cov,
            fork,
            plus_init,
            y_init,
        }
    }

    pub fn patch(&self) -> &CodePatch {
        &self.patch
    }

    pub fn network(&self) -> &MajoranaNetwork {
        &self.net
    }

    /// Rotate qubit `q` by `angle` and force its X and gauge observables
    /// to +1, multiplying both conditional probabilities into `acc`.
    /// Returns false when the forced branch has vanishing probability.
    fn force_qubit(cov: &mut CovarianceMatrix, q: usize, angle: f64, acc: &mut Scaled) -> bool {
        let (rp, rq) = z_rotation_pair(q);
        cov.apply_rotation(angle, rp, rq);
        let (x0, x1) = x_pair(q);
        match cov.measure_forced(x0, x1, true) {
            Ok(p) => acc.mul(p),
            Err(_) => return false,
        }
        let (s0, s1) = sx_pair(q);
        match cov.measure_forced(s0, s1, true) {
            Ok(p) => acc.mul(p),
            Err(_) => return false,
        }
        true
    }

    /// Two all-plus forced runs from the given initial logical state at
    /// per-qubit angles `beta`: one as given and one with an extra π/2 on
    /// the top row (a logical Z inserted before readout). Per-qubit blocks
    /// commute, so rows d−1..1 are processed once and the state is forked
    /// before the two row-0 finishes.
    #[allow(clippy::needless_range_loop)] // q is a qubit id, not just an index into beta
    fn forced_pair(&mut self, init: LogicalInit, beta: &[f64]) -> (Scaled, Scaled) {
        let d = self.patch.d;
        let n = self.patch.n_qubits();
        let pairs: &[(usize, usize)] = match init {
            LogicalInit::XPlus => &self.plus_init,
            LogicalInit::YPlus => &self.y_init,
        };
        self.cov
            .reset_to_pairs(pairs)
            .expect("stored pairing stays valid");
        let mut shared = Scaled::ONE;
        for q in d..n {
            if !Self::force_qubit(&mut self.cov, q, beta[q], &mut shared) {
                return (Scaled::DEAD, Scaled::DEAD);
            }
        }
        self.fork.assign_from(&self.cov);
        let mut plain = shared;
        for q in 0..d {
            if !Self::force_qubit(&mut self.cov, q, beta[q], &mut plain) {
                plain = Scaled::DEAD;
                break;
            }
        }
        self.cov.assign_from(&self.fork);
        let mut z_inserted = shared;
        for q in 0..d {
            if !Self::force_qubit(&mut self.cov, q, beta[q] + FRAC_PI_2, &mut z_inserted) {
                z_inserted = Scaled::DEAD;
                break;
            }
        }
        (plain, z_inserted)
    }

    fn run_quadruple(
        &mut self,
        angles: &[f64],
        correction: &[bool],
    ) -> (Scaled, Scaled, Scaled, Scaled) {
        let n = self.patch.n_qubits();
        assert_eq!(angles.len(), n);
        assert_eq!(correction.len(), n);
        let beta: Vec<f64> = (0..n)
            .map(|q| angles[q] + if correction[q] { FRAC_PI_2 } else { 0.0 })
            .collect();
        let (den, num) = self.forced_pair(LogicalInit::XPlus, &beta);
        let (den_y, num_y) = self.forced_pair(LogicalInit::YPlus, &beta);
        (den, num, den_y, num_y)
    }

    /// Residual logical angle θ_L ∈ (−π/2, π/2] of syndrome branch `s`
    /// under `correction`, together with the branch's unnormalized log
    /// weight: ln P(s) up to an additive constant independent of both the
    /// syndrome and the angles, so weights normalize over all syndromes
    /// at fixed angles. Panics if the branch has vanishing probability.
    pub fn analyze_syndrome(
        &mut self,
        angles: &[f64],
        s: &[bool],
        correction: &[bool],
    ) -> (f64, f64) {
        assert_eq!(
            self.patch.syndrome_of_support(correction),
            s,
            "correction does not produce the requested syndrome"
        );
        let (den, num, den_y, num_y) = self.run_quadruple(angles, correction);
        let cos2 = balance_ratio(den, num);
        let sin2 = balance_ratio(den_y, num_y);
        assert!(
            !cos2.is_nan() && !sin2.is_nan(),
            "syndrome branch has vanishing probability at the given angles"
        );
        let theta_l = 0.5 * sin2.atan2(cos2);
        let ln_weight = log_add_exp(den.ln(), num.ln());
        (theta_l, ln_weight)
    }

    /// `analyze_syndrome` restricted to the angle.
    pub fn logical_angle(&mut self, angles: &[f64], s: &[bool], correction: &[bool]) -> f64 {
        self.analyze_syndrome(angles, s, correction).0
    }

    /// One measurement pass: rotate each qubit by its angle, project onto
    /// its gauge +1 sector, and sample its X observable — realized as an X
    /// pair measurement drawn from the gauge-normalized conditional
    /// followed by the gauge companion forced to the same outcome.
    /// Returns per-qubit outcomes (true = −1).
    ///
    /// The per-step gauge normalizers multiply to exactly 2^(1−n) on every
    /// branch; this is asserted within `GAUGE_HALF_TOL` and certifies the
    /// returned sample is unbiased.
    pub fn sample_m<R: Rng>(&mut self, angles: &[f64], rng: &mut R) -> Vec<bool> {
        let n = self.patch.n_qubits();
        assert_eq!(angles.len(), n);
        self.cov
            .reset_to_pairs(&self.plus_init)
            .expect("stored pairing stays valid");
        let mut m = vec![false; n];
        let mut ln_sector = 0.0f64;
        for q in 0..n {
            let (rp, rq) = z_rotation_pair(q);
            self.cov.apply_rotation(angles[q], rp, rq);
            let (x0, x1) = x_pair(q);
            let (s0, s1) = sx_pair(q);
            let x_exp = self.cov.entry(x0, x1);
            let sx_exp = self.cov.entry(s0, s1);
            let four_point = self.cov.pfaffian_expectation(&[x0, x1, s0, s1]);
            // Weight of outcome m with the gauge sector projected to +1:
            // ⟨¼ (1 + m X̂)(1 + m ŜX̂)⟩.
            let w_plus = (1.0 + x_exp + sx_exp + four_point) / 4.0;
            let w_minus = (1.0 - x_exp - sx_exp + four_point) / 4.0;
            let sector = (1.0 + four_point) / 2.0;
            assert!(
                sector > MEAS_PROB_FLOOR,
                "gauge sector vanishes at qubit {q}"
            );
            ln_sector += sector.ln();
            let mut plus = rng.gen_bool((w_plus / sector).clamp(0.0, 1.0));
            // A draw landing on an outcome of vanishing weight is a
            // rounding fluke; take the complementary outcome instead.
            if (if plus { w_plus } else { w_minus }) < MEAS_PROB_FLOOR {
                plus = !plus;
            }
            self.cov
                .measure_forced(x0, x1, plus)
                .expect("sampled X outcome has nonvanishing probability");
            self.cov
                .measure_forced(s0, s1, plus)
                .expect("gauge companion consistent with the sampled outcome");
            m[q] = !plus;
        }
        let expected = (1.0 - n as f64) * LN_2;
        assert!(
            (ln_sector - expected).abs() < GAUGE_HALF_TOL * (n as f64).max(8.0),
            "gauge-sector normalization drifted: {ln_sector} vs {expected}"
        );
        m
    }

    /// Sample `rounds` consecutive stabilizer rounds at physical angle
    /// `theta`. After each round the canonical correction of its syndrome
    /// is folded into the next round's angles as π/2 offsets, so every
    /// round is analyzed from a fresh |+_L⟩ start.
    pub fn sample_rounds<R: Rng>(
        &mut self,
        theta: f64,
        rounds: usize,
        decode2d: &Correct2d,
        rng: &mut R,
    ) -> RoundsRecord {
        assert!(rounds >= 1, "at least one round");
        let n = self.patch.n_qubits();
        let mut prev_correction = vec![false; n];
        let mut rec = RoundsRecord {
            m_rounds: Vec::with_capacity(rounds),
            syndromes: Vec::with_capacity(rounds),
            theta_rounds: Vec::with_capacity(rounds),
            theta_star: 0.0,
            final_correction: Vec::new(),
        };
        for _ in 0..rounds {
            let angles: Vec<f64> = prev_correction
                .iter()
                .map(|&c| theta + if c { FRAC_PI_2 } else { 0.0 })
                .collect();
            let m = self.sample_m(&angles, rng);
            let s = self.patch.syndrome_of_support(&m);
            let correction = decode2d(&s);
            assert_eq!(correction.len(), n, "correction support length");
            let (theta_l, _) = self.analyze_syndrome(&angles, &s, &correction);
            rec.theta_star += theta_l;
            rec.m_rounds.push(m);
            rec.syndromes.push(s);
            rec.theta_rounds.push(theta_l);
            prev_correction = correction;
        }
        rec.final_correction = prev_correction;
        rec
    }

    /// Deterministic replay of a given syndrome history: Σ_j θ_j with the
    /// same angle folding as `sample_rounds`. The history must have
    /// nonvanishing probability.
    pub fn branch_theta_star(
        &mut self,
        theta: f64,
        syndromes: &[Vec<bool>],
        decode2d: &Correct2d,
    ) -> f64 {
        let n = self.patch.n_qubits();
        let mut prev_correction = vec![false; n];
        let mut total = 0.0;
        for s in syndromes {
            let angles: Vec<f64> = prev_correction
                .iter()
                .map(|&c| theta + if c { FRAC_PI_2 } else { 0.0 })
                .collect();
            let correction = decode2d(s);
            let (theta_l, _) = self.analyze_syndrome(&angles, s, &correction);
            total += theta_l;
            prev_correction = correction;
        }
        total
    }

    /// Exhaustive single-round table at uniform angle `theta`: for every
    /// syndrome, its probability (normalized over the full set) and its
    /// residual logical angle (NaN on zero-probability branches). Intended
    /// for small patches; the syndrome count is 2^((d²−1)/2).
    pub fn single_round_distribution(
        &mut self,
        theta: f64,
        decode2d: &Correct2d,
    ) -> Vec<(Vec<bool>, f64, f64)> {
        let n_x = self.patch.x_faces.len();
        assert!(n_x <= 20, "exhaustive table limited to 2^20 syndromes");
        let n = self.patch.n_qubits();
        let angles = vec![theta; n];
        let mut rows: Vec<(Vec<bool>, f64, f64)> = Vec::with_capacity(1 << n_x);
        let mut ln_weights: Vec<f64> = Vec::with_capacity(1 << n_x);
        for mask in 0..(1u32 << n_x) {
            let s: Vec<bool> = (0..n_x).map(|f| (mask >> f) & 1 == 1).collect();
            let correction = decode2d(&s);
            assert_eq!(correction.len(), n);
            assert_eq!(self.patch.syndrome_of_support(&correction), s);
            let (den, num, den_y, num_y) = self.run_quadruple(&angles, &correction);
            let cos2 = balance_ratio(den, num);
            let sin2 = balance_ratio(den_y, num_y);
            let theta_l = if cos2.is_nan() || sin2.is_nan() {
                f64::NAN
            } else {
                0.5 * sin2.atan2(cos2)
            };
            ln_weights.push(log_add_exp(den.ln(), num.ln()));
            rows.push((s, 0.0, theta_l));
        }
        let hi = ln_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi > f64::NEG_INFINITY, "all syndromes have zero weight");
        let mut total = 0.0;
        for w in &mut ln_weights {
            *w = (*w - hi).exp();
            total += *w;
        }
        for (row, w) in rows.iter_mut().zip(&ln_weights) {
            row.1 = w / total;
        }
        rows
    }
}
