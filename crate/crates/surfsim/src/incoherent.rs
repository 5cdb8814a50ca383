//! Monte Carlo baseline for stochastic Z errors.
//!
//! This is the classical counterpart of the coherent pipeline: each qubit is
//! flipped by Ẑ independently with probability p in every round, syndrome
//! records pick up independent flips with probability q (final round clean),
//! and the same space–time matching decoder proposes a correction. A shot
//! fails when the correction differs from the accumulated error by a logical
//! operator. Because the noise is stochastic, the failure indicator is the
//! whole story — there is no residual rotation angle to track.

use crate::decoder::{apply_readout_noise, detection_events, mwpm_decode, DetectionGraph};
use crate::lattice::CodePatch;
use crate::util::shot_rng;
use rand::Rng;
use rayon::prelude::*;

/// Outcome of one stochastic-noise shot.
#[derive(Debug, Clone)]
pub struct IncoherentShot {
    /// Fresh Ẑ flips inserted in each round (round-major, qubit-indexed).
    pub z_errors_per_round: Vec<Vec<bool>>,
    /// Syndrome records after readout flips, as handed to the decoder.
    pub noisy_syndromes: Vec<Vec<bool>>,
    /// Decoder-proposed Ẑ correction support.
    pub correction: Vec<bool>,
    /// True when correction ⊕ accumulated error is a logical operator.
    pub failure: bool,
}

/// Simulate one shot of the stochastic model, building the detection graph
/// on the fly. Prefer [`simulate_incoherent_shot_on`] with a prebuilt graph
/// when running many shots at the same parameters.
pub fn simulate_incoherent_shot<R: Rng>(
    patch: &CodePatch,
    p: f64,
    q: f64,
    rounds: usize,
    rng: &mut R,
) -> IncoherentShot {
    let graph = DetectionGraph::new(patch, rounds, p, q);
    simulate_incoherent_shot_on(patch, &graph, p, q, rng)
}

/// Simulate one shot against a prebuilt detection graph. The graph must have
/// been constructed for the same patch and the same (p, q) rates.
pub fn simulate_incoherent_shot_on<R: Rng>(
    patch: &CodePatch,
    graph: &DetectionGraph,
    p: f64,
    q: f64,
    rng: &mut R,
) -> IncoherentShot {
    assert!((0.0..0.5).contains(&p), "flip rate must lie in [0, 0.5)");
    let rounds = graph.rounds();
    let n = patch.n_qubits();

    let mut cumulative = vec![false; n];
    let mut z_errors_per_round = Vec::with_capacity(rounds);
    let mut syndromes = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut fresh = vec![false; n];
        if p > 0.0 {
            for flip in fresh.iter_mut() {
                *flip = rng.gen_bool(p);
            }
        }
        for (acc, &f) in cumulative.iter_mut().zip(fresh.iter()) {
            *acc ^= f;
        }
        z_errors_per_round.push(fresh);
        syndromes.push(patch.syndrome_of_support(&cumulative));
    }

    let noisy_syndromes = apply_readout_noise(&syndromes, q, rng);
    let events = detection_events(&noisy_syndromes);
    let decoded = mwpm_decode(graph, &events);

    let mut residual = decoded.z_support.clone();
    for (r, &e) in residual.iter_mut().zip(cumulative.iter()) {
        *r ^= e;
    }
    let failure = patch.logical_class(&residual);

    IncoherentShot {
        z_errors_per_round,
        noisy_syndromes,
        correction: decoded.z_support,
        failure,
    }
}

/// Monte Carlo logical-failure-rate estimate with its binomial standard
/// error. Shots are distributed over the current rayon pool; each one draws
/// from its own counter-derived stream, so the estimate is identical for any
/// worker count.
pub fn failure_rate(
    patch: &CodePatch,
    p: f64,
    q: f64,
    rounds: usize,
    shots: usize,
    master_seed: u64,
) -> (f64, f64) {
    assert!(shots > 0, "failure rate needs at least one shot");
    let graph = DetectionGraph::new(patch, rounds, p, q);
    let failures: usize = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(master_seed, shot as u64);
            simulate_incoherent_shot_on(patch, &graph, p, q, &mut rng).failure as usize
        })
        .sum();
    let rate = failures as f64 / shots as f64;
    let err = (rate * (1.0 - rate) / shots as f64).sqrt();
    (rate, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::decode2d;
    use crate::lattice::build_patch;
    use crate::oracle::matching::naive_model_failure_rate;

    /// Exact logical-failure probability of a given single-round corrector,
    /// by enumerating every Ẑ-error pattern with its binomial weight.
    fn enumerate_failure_rate(
        patch: &CodePatch,
        p: f64,
        correct: &dyn Fn(&[bool]) -> Vec<bool>,
    ) -> f64 {
        let n = patch.n_qubits();
        assert!(n <= 20, "enumeration is exponential in qubit count");
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let support: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
            let weight: f64 = support
                .iter()
                .map(|&e| if e { p } else { 1.0 - p })
                .product();
            let syndrome = patch.syndrome_of_support(&support);
            let mut residual = correct(&syndrome);
            for (r, &e) in residual.iter_mut().zip(support.iter()) {
                *r ^= e;
            }
            if patch.logical_class(&residual) {
                total += weight;
            }
        }
        total
    }

    /// Exact failure probability of the best possible (maximum-likelihood)
    /// single-round decoder: for each syndrome, sum the probability of every
    /// consistent error pattern per logical class and concede the smaller sum.
    fn enumerate_ml_failure_rate(patch: &CodePatch, p: f64) -> f64 {
        let n = patch.n_qubits();
        assert!(n <= 20);
        let n_faces = patch.x_faces.len();
        // class_mass[syndrome][class] = total probability of patterns there.
        let mut class_mass = vec![[0.0f64; 2]; 1 << n_faces];
        for mask in 0u32..(1 << n) {
            let support: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
            let weight: f64 = support
                .iter()
                .map(|&e| if e { p } else { 1.0 - p })
                .product();
            let syndrome = patch.syndrome_of_support(&support);
            let key = syndrome
                .iter()
                .enumerate()
                .fold(0usize, |k, (f, &s)| k | ((s as usize) << f));
            class_mass[key][patch.logical_class(&support) as usize] += weight;
        }
        class_mass.iter().map(|m| m[0].min(m[1])).sum()
    }

    #[test]
    fn noiseless_shots_never_fail() {
        let patch = build_patch(3);
        let mut rng = shot_rng(11, 0);
        for _ in 0..50 {
            let shot = simulate_incoherent_shot(&patch, 0.0, 0.0, 2, &mut rng);
            assert!(!shot.failure);
            assert!(shot.correction.iter().all(|&z| !z));
            assert!(shot
                .z_errors_per_round
                .iter()
                .all(|round| round.iter().all(|&e| !e)));
        }
    }

    #[test]
    fn reported_failure_matches_recomputation_from_the_shot_record() {
        let patch = build_patch(3);
        let rounds = 3;
        let (p, q) = (0.06, 0.04);
        let graph = DetectionGraph::new(&patch, rounds, p, q);
        let mut rng = shot_rng(12, 7);
        for _ in 0..200 {
            let shot = simulate_incoherent_shot_on(&patch, &graph, p, q, &mut rng);
            let mut cumulative = vec![false; patch.n_qubits()];
            for round in &shot.z_errors_per_round {
                for (acc, &e) in cumulative.iter_mut().zip(round.iter()) {
                    *acc ^= e;
                }
            }
            let events = detection_events(&shot.noisy_syndromes);
            let decoded = mwpm_decode(&graph, &events);
            assert_eq!(decoded.z_support, shot.correction);
            let mut residual = decoded.z_support;
            for (r, &e) in residual.iter_mut().zip(cumulative.iter()) {
                *r ^= e;
            }
            assert_eq!(patch.logical_class(&residual), shot.failure);
        }
    }

    #[test]
    fn one_round_monte_carlo_matches_exact_enumeration() {
        let patch = build_patch(3);
        let p = 0.08;
        let graph = DetectionGraph::new(&patch, 1, p, 0.0);
        let exact = enumerate_failure_rate(&patch, p, &|s| decode2d(&graph, s));

        let shots = 30_000;
        let (rate, err) = failure_rate(&patch, p, 0.0, 1, shots, 21);
        assert!(
            (rate - exact).abs() <= 3.0 * err,
            "monte carlo {rate} vs exact {exact} (3σ = {})",
            3.0 * err
        );
    }

    #[test]
    fn one_round_decoder_tracks_the_maximum_likelihood_optimum() {
        let patch = build_patch(3);
        for p in [0.02, 0.08, 0.15] {
            let graph = DetectionGraph::new(&patch, 1, p, 0.0);
            let matched = enumerate_failure_rate(&patch, p, &|s| decode2d(&graph, s));
            let optimal = enumerate_ml_failure_rate(&patch, p);
            // No decoder beats the likelihood optimum (exact arithmetic,
            // generous slack for float summation only).
            assert!(
                matched >= optimal - 1e-12,
                "p={p}: matched {matched} below optimum {optimal}"
            );
            // ...and matching should sit close to it at this small size.
            assert!(
                matched <= optimal * 1.35 + 1e-12,
                "p={p}: matched {matched} far above optimum {optimal}"
            );
        }
    }

    #[test]
    fn naive_reference_reproduces_the_failure_rate() {
        let patch = build_patch(3);
        let rounds = 3;
        let (p, q) = (0.02, 0.02);
        let shots = 100_000;
        let (rate, err) = failure_rate(&patch, p, q, rounds, shots, 31);
        let (ref_rate, ref_err) =
            naive_model_failure_rate(&patch, rounds, p, q, shots, 0xFEED);
        let sigma = (err * err + ref_err * ref_err).sqrt();
        assert!(
            (rate - ref_rate).abs() <= 3.0 * sigma,
            "pipeline {rate}±{err} vs reference {ref_rate}±{ref_err}"
        );
    }

    #[test]
    fn failure_rate_is_monotone_in_both_noise_rates() {
        let patch = build_patch(3);
        let rounds = 3;
        let shots = 20_000;
        let (lo, lo_err) = failure_rate(&patch, 0.01, 0.01, rounds, shots, 41);
        let (hi_p, hi_p_err) = failure_rate(&patch, 0.05, 0.01, rounds, shots, 42);
        let (hi_q, hi_q_err) = failure_rate(&patch, 0.01, 0.05, rounds, shots, 43);
        let sig_p = (lo_err * lo_err + hi_p_err * hi_p_err).sqrt();
        let sig_q = (lo_err * lo_err + hi_q_err * hi_q_err).sqrt();
        assert!(hi_p + 3.0 * sig_p >= lo, "raising p lowered the rate");
        assert!(hi_q + 3.0 * sig_q >= lo, "raising q lowered the rate");
    }

    #[test]
    fn failure_rate_is_identical_for_any_worker_count() {
        let patch = build_patch(3);
        let args = (0.03, 0.02, 2, 2_000usize, 55u64);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| failure_rate(&patch, args.0, args.1, args.2, args.3, args.4));
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| failure_rate(&patch, args.0, args.1, args.2, args.3, args.4));
        assert_eq!(single, several);
    }
}
