//! Numerical tolerances used by the library and its acceptance tests.
//!
//! Every constant is pinned here, in one place, so that test expectations
//! cannot drift silently. Each tolerance is justified by the arithmetic of
//! the quantity it guards, not tuned to make a particular run pass.

/// Entrywise agreement between covariance-matrix evolution and the dense
/// fermionic simulator on small (≤ 4 mode) systems. Both sides perform
/// O(10²–10³) floating-point operations per entry, so agreement far below
/// 1e-10 is expected for correct code; 1e-10 leaves two orders of margin
/// over accumulated rounding while still catching any sign or index error
/// (which shows up at O(1)).
pub const DENSE_EQUIV_TOL: f64 = 1e-10;

/// Agreement between the partial-pivot Pfaffian and a cofactor-expansion
/// Pfaffian on matrices of dimension ≤ 8 with O(1) entries. Both
/// evaluations are exact up to rounding; 1e-12 is ~1e4 ULP headroom.
pub const PFAFFIAN_TOL: f64 = 1e-12;

/// Maximum allowed deviation of a pure-state covariance matrix from
/// orthogonality, max |(M Mᵀ − I)_jk|. Exceeding this triggers
/// re-orthogonalization (with a logged warning); it is also the pass/fail
/// bound for purity checks in tests.
pub const PURITY_TOL: f64 = 1e-6;

/// Smallest probability at which a forced projective outcome is accepted.
/// Below this the trajectory is numerically indistinguishable from an
/// impossible branch and the library reports an error instead of dividing
/// by a vanishing norm.
pub const MEAS_PROB_FLOOR: f64 = 1e-12;

/// During syndrome sampling, each four-Majorana group's gauge projection
/// has a branch-dependent norm, but the product of those norms over a full
/// pass is exactly 2^(1−n) on every branch (the projections commute out of
/// the measurement chain). Per-shot tolerance on that identity in log
/// space, scaled by the qubit count; it certifies the sampling
/// conditionals are normalized, which is what makes the pass an unbiased
/// sampler. Exact in real arithmetic, so only rounding noise is tolerated.
pub const GAUGE_HALF_TOL: f64 = 1e-9;

/// Per-syndrome and per-branch agreement of logical rotation angles between
/// the covariance-matrix pipeline and the dense statevector reference
/// (distance ≤ 3). Angles are extracted through atan2 of O(1) quantities,
/// so 1e-8 is far above rounding but far below any structural error
/// (structural errors shift angles by multiples of π/2).
pub const ANGLE_TOL: f64 = 1e-8;

/// Agreement of branch/syndrome probabilities between the two pipelines on
/// distance ≤ 3 systems, and internal normalization checks
/// (Σ_s P(s) = 1). Probabilities are O(1) sums of ≤ 4096 terms.
pub const PROB_TOL: f64 = 1e-10;

/// Leakage bound for decoded statevectors: after projecting onto a syndrome
/// sector and applying the canonical correction, all weight must lie in the
/// code space, |⟨+L|Φ⟩|² + |⟨−L|Φ⟩|² = 1.
pub const LEAKAGE_TOL: f64 = 1e-10;

/// Total-variation distance between 1e5 sampled syndromes and the exact
/// distribution over the 16 syndromes of a distance-3 round. The expected
/// TVD of a multinomial sample of N draws over k cells is
/// ≈ √(k/(2πN)) ≈ 0.005 for k = 16, N = 1e5; 0.01 is a ~4σ bound, so a
/// false failure is rare while any real distribution error (≥ one cell off
/// by O(p) ≈ 0.09) fails decisively.
pub const TVD_BOUND: f64 = 0.01;

/// Matched-weight agreement between the blossom decoder and brute-force
/// enumeration of matchings. Edge weights are O(1)–O(10) log-likelihood
/// ratios; path sums involve ≤ ~20 additions.
pub const MATCH_WEIGHT_TOL: f64 = 1e-9;

/// Edge weight assigned when a flip channel has probability 0 (its edges
/// must never be chosen); any path using such an edge is costlier than any
/// path avoiding it, since real weights are ≤ ln((1-p)/p) ≲ 30 per edge
/// and paths have ≤ O(10³) edges.
pub const SENTINEL_WEIGHT: f64 = 1e6;

/// Expected threshold of the matched incoherent (Pauli-twirled) channel
/// under phenomenological readout noise q = p, with its acceptance window.
pub const INCOHERENT_THRESHOLD: f64 = 0.029;
pub const INCOHERENT_THRESHOLD_WINDOW: f64 = 0.003;

/// Expected threshold for coherent rotations (p = sin²θ, q = p) with its
/// acceptance window.
pub const COHERENT_THRESHOLD: f64 = 0.026;
pub const COHERENT_THRESHOLD_WINDOW: f64 = 0.004;

/// Statistical z-score used for "at 2σ" comparisons in acceptance checks
/// (monotonicity of ratios, drift of crossing points, twirl bounds).
pub const TWO_SIGMA: f64 = 2.0;

/// Probability below which an enumerated syndrome branch is treated as
/// unreachable and pruned from exhaustive tables. Genuine branch
/// probabilities at the angles used in tests are ≥ 10⁻⁹; accumulated
/// rounding in a 512-dimensional state stays below 10⁻¹³.
pub const ORACLE_BRANCH_FLOOR: f64 = 1e-13;
