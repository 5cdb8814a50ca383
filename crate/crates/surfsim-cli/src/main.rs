//! Command-line driver: sweeps, curve analyses, self-validation, and
//! geometry dumps for the rotated-surface-code coherent-error simulator.
//!
//! Exit codes: 0 = success, 1 = bad configuration or malformed input,
//! 2 = runtime failure (I/O, non-convergent fit, failed validation).

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod validate;

#[derive(Parser)]
#[command(
    name = "surfsim",
    version,
    about = "Simulate the rotated surface code under coherent Z rotations with noisy readout"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a JSON config file.
    Simulate {
        /// JSON file deserializing into the sweep config (see README).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's worker-thread count.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a JSON-lines trace of every coherent shot (debug scale).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Fit the finite-size-scaling ansatz to the infidelity curves of a
    /// sweep CSV and report the threshold with uncertainties.
    ThresholdFit {
        /// Sweep CSV produced by `simulate`.
        #[arg(long)]
        input: PathBuf,
        /// Restrict to rows at this readout rate (required when the CSV
        /// holds several).
        #[arg(long)]
        q: Option<f64>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate pairwise crossings of the diamond-norm curves and
    /// extrapolate them to infinite code distance.
    DiamondAnalysis {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the threshold for every readout rate in a sweep CSV grid.
    ThresholdMap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the simulation engines against independent dense
    /// references and print a pass/fail table.
    Validate {
        /// Seed for the randomized cross-check instances.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Dump the patch and Majorana-network geometry as JSON.
    DumpLattice {
        /// Odd code distance.
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    /// Bad configuration or malformed input → exit 1.
    Config(String),
    /// Runtime failure → exit 2.
    Runtime(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            workers,
            out,
            trace,
        } => simulate(config, seed, workers, out, trace),
        Command::ThresholdFit { input, q, out } => threshold_fit(input, q, out),
        Command::DiamondAnalysis { input, q, out } => diamond_analysis(input, q, out),
        Command::ThresholdMap { input, out } => threshold_map_cmd(input, out),
        Command::Validate { seed } => validate::run(seed),
        Command::DumpLattice { d, out } => dump_lattice(d, out),
    }
}

fn simulate(
    config_path: PathBuf,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config: surfsim::experiments::SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", config_path.display())))?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if workers.is_some() {
        config.workers = workers;
    }
    if out.is_some() {
        config.out_dir = out;
    }
    if trace.is_some() {
        config.trace_path = trace;
    }
    let outputs = surfsim::experiments::run_sweep(&config).map_err(|e| match e {
        surfsim::experiments::SweepError::BadConfig(msg) => CliError::Config(msg),
        other => CliError::Runtime(other.to_string()),
    })?;
    println!(
        "wrote {} rows to {} (manifest: {})",
        outputs.rows.len(),
        outputs.csv_path.display(),
        outputs.manifest_path.display()
    );
    Ok(())
}

/// Parsed numeric sweep row (subset of the CSV columns used here).
struct Row {
    d: usize,
    p: f64,
    q: f64,
    pli: f64,
    pli_err: f64,
    pld: f64,
}

fn read_rows(path: &PathBuf) -> Result<Vec<Row>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty CSV".into()))?;
    if header.trim() != surfsim::experiments::CSV_HEADER {
        return Err(CliError::Config(format!(
            "unexpected CSV header:\n  got      {header}\n  expected {}",
            surfsim::experiments::CSV_HEADER
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(CliError::Config(format!(
                "line {}: expected 14 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64, CliError> {
            fields[i].trim().parse::<f64>().map_err(|e| {
                CliError::Config(format!("line {}: field {}: {e}", lineno + 2, i + 1))
            })
        };
        rows.push(Row {
            d: fields[0].trim().parse::<usize>().map_err(|e| {
                CliError::Config(format!("line {}: field 1: {e}", lineno + 2))
            })?,
            p: num(1)?,
            q: num(2)?,
            pli: num(6)?,
            pli_err: num(7)?,
            pld: num(8)?,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Config("CSV holds no data rows".into()));
    }
    Ok(rows)
}

/// Keep only rows at one readout rate, selected by `q` or by uniqueness.
fn filter_q(rows: Vec<Row>, q: Option<f64>) -> Result<Vec<Row>, CliError> {
    let mut qs: Vec<f64> = rows.iter().map(|r| r.q).collect();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    match q {
        Some(target) => {
            let kept: Vec<Row> = rows
                .into_iter()
                .filter(|r| (r.q - target).abs() < 1e-12)
                .collect();
            if kept.is_empty() {
                return Err(CliError::Config(format!(
                    "no rows at q = {target}; available: {qs:?}"
                )));
            }
            Ok(kept)
        }
        None if qs.len() == 1 => Ok(rows),
        None => Err(CliError::Config(format!(
            "CSV holds several readout rates {qs:?}; pick one with --q"
        ))),
    }
}

fn group_by_d(rows: &[Row]) -> Vec<(usize, Vec<&Row>)> {
    let mut ds: Vec<usize> = rows.iter().map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    ds.into_iter()
        .map(|d| (d, rows.iter().filter(|r| r.d == d).collect()))
        .collect()
}

fn emit(report: serde_json::Value, out: Option<PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match out {
        Some(path) => std::fs::write(&path, text + "\n")
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn threshold_fit(
    input: PathBuf,
    q: Option<f64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let rows = filter_q(read_rows(&input)?, q)?;
    let curves: Vec<(usize, Vec<surfsim::metrics::FitCurvePoint>)> = group_by_d(&rows)
        .into_iter()
        .map(|(d, rs)| {
            let pts = rs
                .iter()
                .map(|r| surfsim::metrics::FitCurvePoint {
                    p: r.p,
                    value: r.pli,
                    err: r.pli_err,
                })
                .collect();
            (d, pts)
        })
        .collect();
    let fit = surfsim::metrics::fit_threshold(&curves).map_err(|e| match e {
        surfsim::metrics::FitError::BadInput(msg) => CliError::Config(msg),
        other => CliError::Runtime(other.to_string()),
    })?;
    emit(
        serde_json::json!({
            "p_th": fit.p_th,
            "p_th_err": fit.p_th_err,
            "nu": fit.nu,
            "nu_err": fit.nu_err,
            "a": fit.a,
            "b": fit.b,
            "c": fit.c,
            "chi2": fit.chi2,
            "dof": fit.dof,
            "nu_at_bound": fit.nu_at_bound,
            "covariance_order": ["p_th", "nu", "a", "b", "c"],
            "covariance": fit.covariance,
        }),
        out,
    )
}

fn diamond_analysis(
    input: PathBuf,
    q: Option<f64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let rows = filter_q(read_rows(&input)?, q)?;
    let curves: Vec<(usize, Vec<(f64, f64)>)> = group_by_d(&rows)
        .into_iter()
        .map(|(d, rs)| (d, rs.iter().map(|r| (r.p, r.pld)).collect()))
        .collect();
    let analysis =
        surfsim::metrics::diamond_intersection_analysis(&curves).map_err(|e| match e {
            surfsim::metrics::FitError::BadInput(msg) => CliError::Config(msg),
            other => CliError::Runtime(other.to_string()),
        })?;
    let crossings: Vec<serde_json::Value> = analysis
        .crossings
        .iter()
        .map(|&(d1, d2, root)| {
            serde_json::json!({ "d_small": d1, "d_large": d2, "p_cross": root })
        })
        .collect();
    emit(
        serde_json::json!({
            "crossings": crossings,
            "slope": analysis.slope,
            "intercept_at_infinite_d": analysis.intercept,
            "used_pairs": analysis.used_pairs,
        }),
        out,
    )
}

fn threshold_map_cmd(input: PathBuf, out: Option<PathBuf>) -> Result<(), CliError> {
    let rows = read_rows(&input)?;
    let points: Vec<surfsim::metrics::MapPoint> = rows
        .iter()
        .map(|r| surfsim::metrics::MapPoint {
            q: r.q,
            p: r.p,
            d: r.d,
            p_l_i: r.pli,
            p_l_i_err: r.pli_err,
        })
        .collect();
    let brackets = surfsim::metrics::threshold_map(&points);
    let report: Vec<serde_json::Value> = brackets
        .iter()
        .map(|b| {
            let classes: Vec<serde_json::Value> = b
                .classes
                .iter()
                .map(|&(p, c)| {
                    serde_json::json!({
                        "p": p,
                        "class": match c {
                            surfsim::metrics::Scalability::Scalable => "scalable",
                            surfsim::metrics::Scalability::Unscalable => "unscalable",
                            surfsim::metrics::Scalability::Indeterminate => "indeterminate",
                        },
                    })
                })
                .collect();
            serde_json::json!({
                "q": b.q,
                "lower": b.lower,
                "upper": b.upper,
                "classes": classes,
            })
        })
        .collect();
    emit(serde_json::Value::Array(report), out)
}

fn dump_lattice(d: usize, out: Option<PathBuf>) -> Result<(), CliError> {
    if d.is_multiple_of(2) || d == 0 {
        return Err(CliError::Config(format!(
            "code distance must be odd and positive, got {d}"
        )));
    }
    let patch = surfsim::lattice::build_patch(d);
    let network = surfsim::lattice::network::build_network(&patch);
    let face_json = |faces: &[surfsim::lattice::Face]| -> Vec<serde_json::Value> {
        faces
            .iter()
            .map(|f| serde_json::json!({ "i": f.i, "j": f.j, "qubits": f.qubits }))
            .collect()
    };
    let qubits: Vec<serde_json::Value> = (0..patch.n_qubits())
        .map(|qb| {
            serde_json::json!({
                "index": qb,
                "row": patch.row(qb),
                "col": patch.col(qb),
            })
        })
        .collect();
    emit(
        serde_json::json!({
            "d": d,
            "qubits": qubits,
            "x_faces": face_json(&patch.x_faces),
            "z_faces": face_json(&patch.z_faces),
            "x_logical": patch.x_logical,
            "z_logical": patch.z_logical,
            "majorana": {
                "count": network.n_majorana,
                "links": network.links,
                "corner_ports": network.corner_ports,
            },
        }),
        out,
    )
}
