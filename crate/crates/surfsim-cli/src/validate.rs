//! Self-validation: drive each production engine against an independent
//! dense or exhaustive reference and print a pass/fail table.
//!
//! The references share no code with the implementations they check: the
//! Gaussian engine is compared to operator algebra in the full Fock space,
//! the sampler to an exact statevector enumeration, the matcher to an
//! exhaustive pairing search, and the stochastic baseline to a naive
//! re-implementation of the whole model.

use crate::CliError;
use rand::Rng;
use surfsim::decoder::{mwpm_decode, DetectionGraph};
use surfsim::flo::CovarianceMatrix;
use surfsim::incoherent::failure_rate;
use surfsim::lattice::build_patch;
use surfsim::oracle::fermion::DenseFermion;
use surfsim::oracle::matching::{naive_model_failure_rate, ReferenceMatcher};
use surfsim::oracle::statevector::{brute_force_min_correction, syndrome_key, PatchOracle};
use surfsim::sampler::CoherentSampler;
use surfsim::tolerances::{ANGLE_TOL, DENSE_EQUIV_TOL, MATCH_WEIGHT_TOL, PROB_TOL};
use surfsim::util::shot_rng;

type Check = fn(u64) -> Result<String, String>;

pub fn run(seed: u64) -> Result<(), CliError> {
    let checks: [(&str, Check); 4] = [
        ("gaussian engine vs dense fermion algebra", gaussian_vs_dense),
        ("multi-round sampler vs exact statevector", sampler_vs_statevector),
        ("space-time matcher vs exhaustive pairing", matcher_vs_exhaustive),
        ("stochastic baseline vs naive model", baseline_vs_naive),
    ];
    let mut all_ok = true;
    println!("{:<44} {:<6} detail", "check", "status");
    for (name, check) in checks {
        match check(seed) {
            Ok(detail) => println!("{name:<44} pass   {detail}"),
            Err(why) => {
                all_ok = false;
                println!("{name:<44} FAIL   {why}");
            }
        }
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Runtime("validation checks failed".into()))
    }
}

/// Random rotation/forced-measurement scripts on three fermionic modes,
/// comparing every covariance entry and branch probability against dense
/// operator algebra in the 8-dimensional Fock space.
fn gaussian_vs_dense(seed: u64) -> Result<String, String> {
    let sim = DenseFermion::new(3);
    let nm = sim.n_majorana();
    let pairs: Vec<(usize, usize)> = (0..3).map(|k| (2 * k, 2 * k + 1)).collect();
    let mut rng = shot_rng(seed, 1);
    let mut worst: f64 = 0.0;
    for trial in 0..25 {
        let mut dense = sim.vacuum();
        let mut cov = CovarianceMatrix::from_stabilized_pairs(nm, &pairs, false)
            .expect("disjoint mode pairing");
        for step in 0..10 {
            let p = rng.gen_range(0..nm);
            let mut q = rng.gen_range(0..nm);
            while q == p {
                q = rng.gen_range(0..nm);
            }
            if rng.gen_bool(0.7) {
                let theta = rng.gen_range(-1.5..1.5);
                sim.apply_rotation(&mut dense, theta, p, q);
                cov.apply_rotation(theta, p, q);
            } else {
                // Take the likelier branch so neither side hits a
                // zero-probability projection.
                let plus = sim.pair_expectation(&dense, p, q) >= 0.0;
                let dense_prob = if plus {
                    sim.project_plus(&mut dense, p, q)
                } else {
                    sim.project_plus(&mut dense, q, p)
                };
                let cov_prob = cov
                    .measure_forced(p, q, plus)
                    .map_err(|e| format!("trial {trial} step {step}: {e:?}"))?;
                worst = worst.max((dense_prob - cov_prob).abs());
            }
            let reference = sim.covariance(&dense);
            for j in 0..nm {
                for k in 0..nm {
                    worst = worst.max((cov.entry(j, k) - reference[j * nm + k]).abs());
                }
            }
            if worst >= DENSE_EQUIV_TOL {
                return Err(format!(
                    "trial {trial} step {step}: deviation {worst:.3e} ≥ {DENSE_EQUIV_TOL:.1e}"
                ));
            }
        }
    }
    Ok(format!("25 scripts, max deviation {worst:.2e}"))
}

/// Exact per-syndrome probabilities and logical angles of one stabilizer
/// round at d = 3, θ = 0.3, against the dense statevector enumeration.
fn sampler_vs_statevector(_seed: u64) -> Result<String, String> {
    let patch = build_patch(3);
    let theta = 0.3;
    let correct = |s: &[bool]| brute_force_min_correction(&patch, s);
    let mut sampler = CoherentSampler::new(3);
    let rows = sampler.single_round_distribution(theta, &correct);
    let oracle = PatchOracle::new(&patch);
    let table = oracle.enumerate_folded(theta, 1, &correct);
    let mut worst_prob: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    for (s, prob, theta_l) in &rows {
        let key = syndrome_key(std::slice::from_ref(s), patch.x_faces.len());
        let branch = table
            .lookup(key)
            .ok_or_else(|| format!("syndrome {s:?} missing from the dense table"))?;
        worst_prob = worst_prob.max((prob - branch.probability).abs());
        worst_angle = worst_angle.max((theta_l - branch.theta_star).abs());
    }
    if worst_prob >= PROB_TOL {
        return Err(format!("probability deviation {worst_prob:.3e} ≥ {PROB_TOL:.1e}"));
    }
    if worst_angle >= ANGLE_TOL {
        return Err(format!("angle deviation {worst_angle:.3e} ≥ {ANGLE_TOL:.1e}"));
    }
    Ok(format!(
        "16 syndromes: |Δprob| ≤ {worst_prob:.2e}, |Δθ| ≤ {worst_angle:.2e}"
    ))
}

/// Random space–time detection instances at d = 3, p = q = 0.05: the
/// matcher's total weight must equal the exhaustive pairing optimum.
fn matcher_vs_exhaustive(seed: u64) -> Result<String, String> {
    let patch = build_patch(3);
    let rounds = 3;
    let (p, q) = (0.05, 0.05);
    let graph = DetectionGraph::new(&patch, rounds, p, q);
    let reference = ReferenceMatcher::new(&patch, rounds, p, q);
    let mut rng = shot_rng(seed, 2);
    let n_faces = patch.x_faces.len();
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    while instances < 200 {
        let mut events = Vec::new();
        for t in 1..=rounds {
            for f in 0..n_faces {
                if rng.gen_bool(0.15) {
                    events.push((f, t));
                }
            }
        }
        if events.len() > 10 {
            continue; // keep the exhaustive search cheap
        }
        instances += 1;
        let decoded = mwpm_decode(&graph, &events);
        let (best, _) = reference.optimum(&events);
        let delta = (decoded.total_weight - best).abs();
        worst = worst.max(delta);
        if delta >= MATCH_WEIGHT_TOL {
            return Err(format!(
                "events {events:?}: weight {} vs optimum {best} (Δ = {delta:.3e})",
                decoded.total_weight
            ));
        }
    }
    Ok(format!("200 instances, max weight gap {worst:.2e}"))
}

/// Full-pipeline failure rate of the stochastic model at d = 3,
/// p = q = 0.02, against a naive re-implementation (3σ agreement).
fn baseline_vs_naive(seed: u64) -> Result<String, String> {
    let patch = build_patch(3);
    let rounds = 3;
    let (p, q) = (0.02, 0.02);
    let shots = 20_000;
    let (rate, err) = failure_rate(&patch, p, q, rounds, shots, seed ^ 0xA5A5);
    let (ref_rate, ref_err) = naive_model_failure_rate(&patch, rounds, p, q, shots, seed ^ 0x5A5A);
    let sigma = (err * err + ref_err * ref_err).sqrt();
    let delta = (rate - ref_rate).abs();
    if delta > 3.0 * sigma {
        return Err(format!(
            "rate {rate:.5} vs reference {ref_rate:.5} differs by {delta:.2e} > 3σ = {:.2e}",
            3.0 * sigma
        ));
    }
    Ok(format!(
        "rate {rate:.5} vs {ref_rate:.5} (|Δ| = {delta:.1e} ≤ 3σ = {:.1e})",
        3.0 * sigma
    ))
}
