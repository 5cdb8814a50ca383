//! Sweep orchestration: run the coherent pipeline and its stochastic
//! baseline over a (d, rate, q) grid, aggregate metrics, and write
//! plot-ready CSV plus a JSON run manifest.
//!
//! Determinism contract: every sweep point and pipeline derives its own
//! seed from the master seed, and every shot inside a point draws from its
//! own counter-indexed stream. Results — including the CSV bytes — are
//! therefore identical for identical (config, master_seed), no matter how
//! many worker threads run the shots.

use crate::decoder::{decode2d, resample_final_angle, DetectionGraph};
use crate::incoherent::failure_rate;
use crate::lattice::build_patch;
use crate::metrics::{attach_incoherent_baseline, estimate_metrics, MetricEstimate};
use crate::sampler::CoherentSampler;
use crate::util::{fold_angle, mix_seed, shot_rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Sweep description. Rates may be given either as twirled flip rates
/// (`p_list`, with θ = asin√p) or directly as rotation angles
/// (`theta_list`, with p = sin²θ) — exactly one of the two. Readout rates
/// come from `q_list`, or track the flip rate when `q_equals_p` is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d_list: Vec<usize>,
    #[serde(default)]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub theta_list: Vec<f64>,
    #[serde(default)]
    pub q_list: Vec<f64>,
    #[serde(default)]
    pub q_equals_p: bool,
    /// Noiseless coherent shots per point (multiplied by d when
    /// `shots_scale_with_d` is set, mirroring shots ∝ d sampling plans).
    pub shots_noiseless: usize,
    #[serde(default)]
    pub shots_scale_with_d: bool,
    /// Readout-noise resamples per noiseless shot.
    pub resamples_readout: usize,
    /// Shots for the stochastic baseline that the twirl ratios divide by.
    #[serde(default = "default_incoherent_shots")]
    pub shots_incoherent: usize,
    pub master_seed: u64,
    /// Stabilizer rounds; defaults to d rounds per point.
    #[serde(default)]
    pub rounds_override: Option<usize>,
    /// Worker threads (default: rayon's choice).
    #[serde(default)]
    pub workers: Option<usize>,
    /// Output directory for CSV + manifest (required by `run_sweep`,
    /// unused by `run_sweep_rows`).
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Optional JSON-lines trace of every coherent shot (debug scale only).
    #[serde(default)]
    pub trace_path: Option<PathBuf>,
}

fn default_incoherent_shots() -> usize {
    20_000
}

/// One aggregated CSV row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub shots: usize,
    pub resamples: usize,
    pub pli: f64,
    pub pli_err: f64,
    pub pld: f64,
    pub pld_err: f64,
    pub twirl_i: f64,
    pub twirl_d: f64,
    pub coh_ratio: f64,
    pub coh_ratio_err: f64,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("bad sweep config: {0}")]
    BadConfig(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Paths written by a completed sweep.
#[derive(Debug, Clone)]
pub struct SweepOutputs {
    pub rows: Vec<SweepRow>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

#[derive(Debug, Clone, Copy)]
struct PointSpec {
    d: usize,
    theta: f64,
    p: f64,
    q: f64,
}

fn validate(config: &SweepConfig) -> Result<Vec<PointSpec>, SweepError> {
    let bad = |msg: String| Err(SweepError::BadConfig(msg));
    if config.d_list.is_empty() {
        return bad("d_list must not be empty".into());
    }
    for &d in &config.d_list {
        if d % 2 == 0 || d == 0 {
            return bad(format!("code distance must be odd and positive, got {d}"));
        }
    }
    match (config.p_list.is_empty(), config.theta_list.is_empty()) {
        (true, true) => return bad("give p_list or theta_list".into()),
        (false, false) => return bad("give p_list or theta_list, not both".into()),
        _ => {}
    }
    if config.q_equals_p && !config.q_list.is_empty() {
        return bad("q_equals_p and q_list are mutually exclusive".into());
    }
    if !config.q_equals_p && config.q_list.is_empty() {
        return bad("give q_list or set q_equals_p".into());
    }
    if config.shots_noiseless == 0 || config.resamples_readout == 0 || config.shots_incoherent == 0
    {
        return bad("shot and resample counts must be positive".into());
    }
    if config.rounds_override == Some(0) {
        return bad("rounds_override must be at least 1".into());
    }

    // (θ, p) pairs with p = sin²θ.
    let rates: Vec<(f64, f64)> = if config.p_list.is_empty() {
        config
            .theta_list
            .iter()
            .map(|&t| {
                let s = fold_angle(t).sin();
                (t, s * s)
            })
            .collect()
    } else {
        config
            .p_list
            .iter()
            .map(|&p| (p.sqrt().asin(), p))
            .collect()
    };
    let mut points = Vec::new();
    for &d in &config.d_list {
        for &(theta, p) in &rates {
            if !(0.0..0.5).contains(&p) {
                return bad(format!(
                    "flip rate must lie in [0, 0.5) for decodable weights, got p = {p}"
                ));
            }
            let qs: Vec<f64> = if config.q_equals_p {
                vec![p]
            } else {
                config.q_list.clone()
            };
            for q in qs {
                if !(0.0..0.5).contains(&q) {
                    return bad(format!("readout rate must lie in [0, 0.5), got q = {q}"));
                }
                points.push(PointSpec { d, theta, p, q });
            }
        }
    }
    Ok(points)
}

/// Run the sweep and return the aggregated rows, without touching the
/// filesystem. Deterministic in (config, master_seed).
pub fn run_sweep_rows(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    Ok(run_points(config)?.0)
}

fn run_points(config: &SweepConfig) -> Result<(Vec<SweepRow>, Vec<String>), SweepError> {
    let points = validate(config)?;
    let compute = || -> (Vec<SweepRow>, Vec<String>) {
        let mut rows = Vec::with_capacity(points.len());
        let mut trace_lines = Vec::new();
        for (idx, point) in points.iter().enumerate() {
            let (row, traces) = sweep_point(config, point, idx);
            rows.push(row);
            if config.trace_path.is_some() {
                trace_lines.extend(traces);
            }
        }
        (rows, trace_lines)
    };
    match config.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| SweepError::Pool(e.to_string()))?;
            Ok(pool.install(compute))
        }
        None => Ok(compute()),
    }
}

fn sweep_point(config: &SweepConfig, point: &PointSpec, idx: usize) -> (SweepRow, Vec<String>) {
    let patch = build_patch(point.d);
    let rounds = config.rounds_override.unwrap_or(point.d);
    let graph = DetectionGraph::new(&patch, rounds, point.p, point.q);
    let round_graph = DetectionGraph::new(&patch, 1, point.p, 0.0);
    let shots = if config.shots_scale_with_d {
        config.shots_noiseless * point.d
    } else {
        config.shots_noiseless
    };
    let resamples = config.resamples_readout;
    let want_trace = config.trace_path.is_some();
    let coherent_seed = mix_seed(config.master_seed, 2 * idx as u64);

    let per_shot: Vec<(Vec<f64>, Option<String>)> = (0..shots)
        .into_par_iter()
        .map_init(
            || CoherentSampler::new(point.d),
            |sampler, shot| {
                let mut rng = shot_rng(coherent_seed, shot as u64);
                let record = sampler.sample_rounds(
                    point.theta,
                    rounds,
                    &|s: &[bool]| decode2d(&round_graph, s),
                    &mut rng,
                );
                let theta_ls: Vec<f64> = (0..resamples)
                    .map(|_| resample_final_angle(&patch, &graph, &record, point.q, &mut rng))
                    .collect();
                let trace = want_trace.then(|| {
                    serde_json::json!({
                        "d": point.d,
                        "p": point.p,
                        "q": point.q,
                        "shot": shot,
                        "m_rounds": record.m_rounds,
                        "syndromes": record.syndromes,
                        "theta_rounds": record.theta_rounds,
                        "theta_star": record.theta_star,
                        "theta_ls": theta_ls,
                    })
                    .to_string()
                });
                (theta_ls, trace)
            },
        )
        .collect();

    let theta_ls: Vec<Vec<f64>> = per_shot.iter().map(|(t, _)| t.clone()).collect();
    let traces: Vec<String> = per_shot.into_iter().filter_map(|(_, tr)| tr).collect();

    let mut est: MetricEstimate = estimate_metrics(&theta_ls);
    let incoherent_seed = mix_seed(config.master_seed, 2 * idx as u64 + 1);
    let (rate, rate_err) = failure_rate(
        &patch,
        point.p,
        point.q,
        rounds,
        config.shots_incoherent,
        incoherent_seed,
    );
    attach_incoherent_baseline(&mut est, rate, rate_err);

    let row = SweepRow {
        d: point.d,
        p: point.p,
        q: point.q,
        theta: point.theta,
        shots,
        resamples,
        pli: est.p_l_i,
        pli_err: est.p_l_i_err,
        pld: est.p_l_d,
        pld_err: est.p_l_d_err,
        twirl_i: est.twirl_ratio_i,
        twirl_d: est.twirl_ratio_d,
        coh_ratio: est.coherence_ratio,
        coh_ratio_err: est.coherence_ratio_err,
    };
    (row, traces)
}

/// Frozen CSV header.
pub const CSV_HEADER: &str =
    "d,p,q,theta,shots,resamples,pli,pli_err,pld,pld_err,twirl_i,twirl_d,coh_ratio,coh_ratio_err";

/// Serialize rows to CSV text (shortest-roundtrip float formatting, so the
/// bytes are a pure function of the computed values).
pub fn csv_text(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.d,
            r.p,
            r.q,
            r.theta,
            r.shots,
            r.resamples,
            r.pli,
            r.pli_err,
            r.pld,
            r.pld_err,
            r.twirl_i,
            r.twirl_d,
            r.coh_ratio,
            r.coh_ratio_err
        )
        .expect("string write cannot fail");
    }
    out
}

/// Run the sweep and write `sweep.csv` and `manifest.json` under the
/// configured output directory (plus the optional shot trace).
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutputs, SweepError> {
    let out_dir: &Path = config
        .out_dir
        .as_deref()
        .ok_or_else(|| SweepError::BadConfig("out_dir is required to write results".into()))?;
    let started = std::time::Instant::now();
    let (rows, trace_lines) = run_points(config)?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("sweep.csv");
    std::fs::write(&csv_path, csv_text(&rows))?;
    if let Some(trace_path) = &config.trace_path {
        std::fs::write(trace_path, trace_lines.join("\n") + "\n")?;
    }
    let manifest = serde_json::json!({
        "config": config,
        "master_seed": config.master_seed,
        "version": concat!("surfsim-", env!("CARGO_PKG_VERSION")),
        "wall_seconds": started.elapsed().as_secs_f64(),
        "rows": rows.len(),
    });
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(SweepOutputs {
        rows,
        csv_path,
        manifest_path,
    })
}
