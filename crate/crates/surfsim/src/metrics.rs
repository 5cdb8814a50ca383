//! Logical-error metrics and curve analysis.
//!
//! Estimators turn per-shot logical angles θ_L into the two headline error
//! measures — mean squared sine (maximum infidelity) and mean 2|sin|
//! (diamond-norm distance) — plus derived ratios. Curve-level analyses fit
//! the finite-size-scaling ansatz for a threshold, locate pairwise crossings
//! of diamond-norm curves, and bracket thresholds on a (p, q) grid by
//! monotonicity in the code distance.

use thiserror::Error;

/// Monte Carlo estimate of the logical error metrics at one sweep point.
///
/// `p_l_i` is the mean of sin²θ_L (maximum infidelity), `p_l_d` the mean of
/// 2|sin θ_L| (diamond-norm distance). The twirl ratios compare against the
/// stochastic baseline at the matched flip rate and are NaN until attached.
#[derive(Debug, Clone)]
pub struct MetricEstimate {
    pub p_l_i: f64,
    pub p_l_i_err: f64,
    pub p_l_d: f64,
    pub p_l_d_err: f64,
    /// p_l_d / (2 · p_l_i); ≥ 1 whenever p_l_i > 0, NaN at zero error.
    pub coherence_ratio: f64,
    pub coherence_ratio_err: f64,
    /// Coherent p_l_i over baseline failure rate.
    pub twirl_ratio_i: f64,
    pub twirl_ratio_i_err: f64,
    /// Coherent p_l_d over baseline diamond distance (2 × failure rate).
    pub twirl_ratio_d: f64,
    pub twirl_ratio_d_err: f64,
    /// Number of independently sampled noiseless shots.
    pub shots: usize,
    /// Readout resamples averaged within each shot.
    pub resamples: usize,
}

/// Estimate the logical metrics from per-shot resampled logical angles.
///
/// `theta_ls_per_shot[i]` holds the logical angles of shot i under
/// independent readout-noise resamples. Resamples of one shot share the
/// accumulated rotation, so they are correlated: means are taken per shot
/// first, and standard errors come from the scatter across shots (the
/// independent unit).
pub fn estimate_metrics(theta_ls_per_shot: &[Vec<f64>]) -> MetricEstimate {
    assert!(
        !theta_ls_per_shot.is_empty(),
        "metric estimation needs at least one shot"
    );
    let resamples = theta_ls_per_shot[0].len();
    assert!(resamples > 0, "each shot needs at least one resample");
    assert!(
        theta_ls_per_shot.iter().all(|t| t.len() == resamples),
        "all shots must carry the same resample count"
    );

    let n = theta_ls_per_shot.len();
    let mut a = Vec::with_capacity(n); // per-shot mean sin²
    let mut b = Vec::with_capacity(n); // per-shot mean 2|sin|
    for shot in theta_ls_per_shot {
        let mut sa = 0.0;
        let mut sb = 0.0;
        for &t in shot {
            let s = t.sin();
            sa += s * s;
            sb += 2.0 * s.abs();
        }
        a.push(sa / resamples as f64);
        b.push(sb / resamples as f64);
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let a_bar = mean(&a);
    let b_bar = mean(&b);
    // Sample (co)variances across shots; zero when only one shot exists.
    let (mut var_a, mut var_b, mut cov_ab) = (0.0, 0.0, 0.0);
    if n > 1 {
        for i in 0..n {
            let da = a[i] - a_bar;
            let db = b[i] - b_bar;
            var_a += da * da;
            var_b += db * db;
            cov_ab += da * db;
        }
        let norm = (n - 1) as f64;
        var_a /= norm;
        var_b /= norm;
        cov_ab /= norm;
    }
    let nf = n as f64;
    let sem_a2 = var_a / nf;
    let sem_b2 = var_b / nf;
    let sem_ab = cov_ab / nf;

    // Delta-method error for r = b̄ / (2ā), accounting for the shared shots.
    let (ratio, ratio_err) = if a_bar > 0.0 {
        let r = b_bar / (2.0 * a_bar);
        let dr_db = 1.0 / (2.0 * a_bar);
        let dr_da = -b_bar / (2.0 * a_bar * a_bar);
        let var_r = dr_db * dr_db * sem_b2 + dr_da * dr_da * sem_a2 + 2.0 * dr_da * dr_db * sem_ab;
        (r, var_r.max(0.0).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };

    MetricEstimate {
        p_l_i: a_bar,
        p_l_i_err: sem_a2.sqrt(),
        p_l_d: b_bar,
        p_l_d_err: sem_b2.sqrt(),
        coherence_ratio: ratio,
        coherence_ratio_err: ratio_err,
        twirl_ratio_i: f64::NAN,
        twirl_ratio_i_err: f64::NAN,
        twirl_ratio_d: f64::NAN,
        twirl_ratio_d_err: f64::NAN,
        shots: n,
        resamples,
    }
}

/// Fill in the twirl ratios from a stochastic-baseline failure rate at the
/// matched flip rate. The baseline's diamond distance is 2 × failure rate
/// (every failure is a full logical flip), so both ratios divide by `rate`.
pub fn attach_incoherent_baseline(est: &mut MetricEstimate, rate: f64, rate_err: f64) {
    let ratio_err = |num: f64, num_err: f64| -> f64 {
        if rate > 0.0 && num > 0.0 {
            let r: f64 = num / rate;
            r * ((num_err / num).powi(2) + (rate_err / rate).powi(2)).sqrt()
        } else {
            f64::NAN
        }
    };
    est.twirl_ratio_i_err = ratio_err(est.p_l_i, est.p_l_i_err);
    est.twirl_ratio_d_err = ratio_err(est.p_l_d, est.p_l_d_err);
    est.twirl_ratio_i = if rate > 0.0 { est.p_l_i / rate } else { f64::NAN };
    est.twirl_ratio_d = if rate > 0.0 {
        est.p_l_d / (2.0 * rate)
    } else {
        f64::NAN
    };
}

/// One point of a per-distance error-rate curve, with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct FitCurvePoint {
    pub p: f64,
    pub value: f64,
    pub err: f64,
}

/// Result of the finite-size-scaling threshold fit.
#[derive(Debug, Clone)]
pub struct ThresholdFit {
    pub p_th: f64,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p_th_err: f64,
    pub nu_err: f64,
    /// 5×5 covariance in parameter order (p_th, ν, A, B, C).
    pub covariance: Vec<Vec<f64>>,
    pub chi2: f64,
    pub dof: usize,
    /// True when ν converged onto a box bound — a diagnostic, not clamped
    /// away silently.
    pub nu_at_bound: bool,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("bad fit input: {0}")]
    BadInput(String),
    #[error(
        "fit did not converge after {iterations} iterations \
         (best χ² = {chi2:.6e}, simplex spread = {spread:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        chi2: f64,
        spread: f64,
    },
    #[error("parameter covariance is singular at the fitted optimum")]
    DegenerateCovariance,
}

/// Allowed range for the scaling exponent ν.
pub const NU_BOUNDS: (f64, f64) = (0.5, 2.5);

/// Fit the scaling ansatz v = A + B·x + C·x², x = (p − p_th)·d^{1/ν}, to
/// per-distance curves by weighted least squares. The two nonlinear
/// parameters are minimized by a Nelder–Mead simplex with ν boxed to
/// [`NU_BOUNDS`]; (A, B, C) are profiled out exactly at each step.
pub fn fit_threshold(curves: &[(usize, Vec<FitCurvePoint>)]) -> Result<ThresholdFit, FitError> {
    let distances: std::collections::BTreeSet<usize> = curves.iter().map(|&(d, _)| d).collect();
    if distances.len() < 3 {
        return Err(FitError::BadInput(format!(
            "need at least 3 distinct code distances, got {}",
            distances.len()
        )));
    }
    let mut rates: Vec<f64> = curves
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|pt| pt.p))
        .collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    if rates.len() < 5 {
        return Err(FitError::BadInput(format!(
            "need at least 5 distinct error rates, got {}",
            rates.len()
        )));
    }
    let points: Vec<(usize, FitCurvePoint)> = curves
        .iter()
        .flat_map(|(d, pts)| pts.iter().map(move |&pt| (*d, pt)))
        .collect();
    if points.iter().any(|(_, pt)| pt.err.is_nan() || pt.err <= 0.0) {
        return Err(FitError::BadInput(
            "every point needs a positive standard error".into(),
        ));
    }
    if points.len() < 6 {
        return Err(FitError::BadInput(
            "need more points than the 5 fit parameters".into(),
        ));
    }

    // Profiled χ²: given (p_th, ν), solve the weighted normal equations for
    // (A, B, C) and return the resulting χ² together with the linear part.
    let profile = |p_th: f64, nu: f64| -> (f64, [f64; 3]) {
        let mut m = [[0.0f64; 3]; 3];
        let mut v = [0.0f64; 3];
        for &(d, pt) in &points {
            let x = (pt.p - p_th) * (d as f64).powf(1.0 / nu);
            let phi = [1.0, x, x * x];
            let w = 1.0 / (pt.err * pt.err);
            for r in 0..3 {
                for c in 0..3 {
                    m[r][c] += w * phi[r] * phi[c];
                }
                v[r] += w * phi[r] * pt.value;
            }
        }
        let m_vec: Vec<Vec<f64>> = m.iter().map(|row| row.to_vec()).collect();
        let Some(sol) = solve_linear(&m_vec, v.as_ref()) else {
            return (1e30, [0.0; 3]);
        };
        let abc = [sol[0], sol[1], sol[2]];
        let mut chi2 = 0.0;
        for &(d, pt) in &points {
            let x = (pt.p - p_th) * (d as f64).powf(1.0 / nu);
            let fit = abc[0] + abc[1] * x + abc[2] * x * x;
            let r = (fit - pt.value) / pt.err;
            chi2 += r * r;
        }
        (chi2, abc)
    };
    let objective = |p_th: f64, nu: f64| -> f64 {
        let mut penalty = 0.0;
        if nu < NU_BOUNDS.0 {
            penalty += 1e12 * (NU_BOUNDS.0 - nu).powi(2);
        }
        if nu > NU_BOUNDS.1 {
            penalty += 1e12 * (nu - NU_BOUNDS.1).powi(2);
        }
        let nu_eval = nu.clamp(NU_BOUNDS.0, NU_BOUNDS.1);
        profile(p_th, nu_eval).0 + penalty
    };

    // Initial p_th: where the smallest-d and largest-d curves cross, found
    // by a sign change of their interpolated difference; fall back to the
    // middle of the sampled range.
    let p_init = crossing_guess(curves).unwrap_or_else(|| {
        let (lo, hi) = (rates[0], rates[rates.len() - 1]);
        0.5 * (lo + hi)
    });
    let p_scale = (rates[rates.len() - 1] - rates[0]).max(1e-4);

    let (best, iterations, spread) = nelder_mead_2d(
        &objective,
        [(p_init, 1.0), (p_init + 0.1 * p_scale, 1.0), (p_init, 1.25)],
        800,
        1e-12,
    );
    let (p_th, nu_raw) = best;
    let nu = nu_raw.clamp(NU_BOUNDS.0, NU_BOUNDS.1);
    if spread.is_nan() {
        return Err(FitError::NoConvergence {
            iterations,
            chi2: objective(p_th, nu),
            spread,
        });
    }
    let (chi2, abc) = profile(p_th, nu);
    if chi2.is_nan() || spread > 1e-9 * (1.0 + chi2.abs()) {
        return Err(FitError::NoConvergence {
            iterations,
            chi2,
            spread,
        });
    }
    let nu_at_bound = (nu - NU_BOUNDS.0).abs() < 1e-6 || (nu - NU_BOUNDS.1).abs() < 1e-6;

    // Covariance from the analytic Jacobian of the weighted residuals at
    // the optimum; parameter order (p_th, ν, A, B, C).
    let mut jtj = vec![vec![0.0f64; 5]; 5];
    for &(d, pt) in &points {
        let df = d as f64;
        let scale = df.powf(1.0 / nu);
        let x = (pt.p - p_th) * scale;
        let slope = abc[1] + 2.0 * abc[2] * x;
        let dx_dpth = -scale;
        let dx_dnu = (pt.p - p_th) * scale * df.ln() * (-1.0 / (nu * nu));
        let grad = [
            slope * dx_dpth / pt.err,
            slope * dx_dnu / pt.err,
            1.0 / pt.err,
            x / pt.err,
            x * x / pt.err,
        ];
        for r in 0..5 {
            for c in 0..5 {
                jtj[r][c] += grad[r] * grad[c];
            }
        }
    }
    let covariance = invert(&jtj).ok_or(FitError::DegenerateCovariance)?;
    let p_th_err = covariance[0][0].max(0.0).sqrt();
    let nu_err = covariance[1][1].max(0.0).sqrt();

    Ok(ThresholdFit {
        p_th,
        nu,
        a: abc[0],
        b: abc[1],
        c: abc[2],
        p_th_err,
        nu_err,
        covariance,
        chi2,
        dof: points.len().saturating_sub(5),
        nu_at_bound,
    })
}

/// Estimate where the smallest-d and largest-d curves cross, by linear
/// interpolation of their difference on the common rate grid.
fn crossing_guess(curves: &[(usize, Vec<FitCurvePoint>)]) -> Option<f64> {
    let lo = curves.iter().min_by_key(|&&(d, _)| d)?;
    let hi = curves.iter().max_by_key(|&&(d, _)| d)?;
    if lo.0 == hi.0 {
        return None;
    }
    let interp = |pts: &[FitCurvePoint], p: f64| -> Option<f64> {
        let mut sorted: Vec<_> = pts.to_vec();
        sorted.sort_by(|a, b| a.p.total_cmp(&b.p));
        let w = sorted.windows(2).find(|w| w[0].p <= p && p <= w[1].p)?;
        let t = if w[1].p > w[0].p {
            (p - w[0].p) / (w[1].p - w[0].p)
        } else {
            0.0
        };
        Some(w[0].value + t * (w[1].value - w[0].value))
    };
    let mut grid: Vec<f64> = lo.1.iter().map(|pt| pt.p).collect();
    grid.sort_by(f64::total_cmp);
    let mut previous: Option<(f64, f64)> = None;
    for &p in &grid {
        let (Some(a), Some(b)) = (interp(&lo.1, p), interp(&hi.1, p)) else {
            continue;
        };
        let diff = a - b;
        if let Some((pp, pd)) = previous {
            if pd.signum() != diff.signum() && pd != diff {
                return Some(pp + (p - pp) * pd / (pd - diff));
            }
        }
        previous = Some((p, diff));
    }
    None
}

/// Minimize a 2D function with a Nelder–Mead simplex. Returns the best
/// vertex, the iteration count, and the final value spread.
fn nelder_mead_2d(
    f: &dyn Fn(f64, f64) -> f64,
    init: [(f64, f64); 3],
    max_iter: usize,
    tol: f64,
) -> ((f64, f64), usize, f64) {
    let mut simplex: Vec<((f64, f64), f64)> =
        init.iter().map(|&(x, y)| ((x, y), f(x, y))).collect();
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[2].1 - simplex[0].1;
        if spread.abs() <= tol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let (best, good, worst) = (simplex[0], simplex[1], simplex[2]);
        let centroid = (
            0.5 * (best.0 .0 + good.0 .0),
            0.5 * (best.0 .1 + good.0 .1),
        );
        let dir = (centroid.0 - worst.0 .0, centroid.1 - worst.0 .1);
        let at = |t: f64| (centroid.0 + t * dir.0, centroid.1 + t * dir.1);
        let reflect = at(1.0);
        let fr = f(reflect.0, reflect.1);
        if fr < best.1 {
            let expand = at(2.0);
            let fe = f(expand.0, expand.1);
            simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < good.1 {
            simplex[2] = (reflect, fr);
        } else {
            let contract = if fr < worst.1 { at(0.5) } else { at(-0.5) };
            let fc = f(contract.0, contract.1);
            if fc < worst.1.min(fr) {
                simplex[2] = (contract, fc);
            } else {
                // shrink toward the best vertex
                for vertex in simplex.iter_mut().skip(1) {
                    let x = (
                        0.5 * (vertex.0 .0 + best.0 .0),
                        0.5 * (vertex.0 .1 + best.0 .1),
                    );
                    *vertex = (x, f(x.0, x.1));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let spread = simplex[2].1 - simplex[0].1;
    (simplex[0].0, iterations, spread)
}

/// Pairwise-crossing analysis of diamond-norm curves.
#[derive(Debug, Clone)]
pub struct DiamondAnalysis {
    /// For each consecutive distance pair (d_small, d_large): the crossing
    /// abscissa of their fitted quadratics inside the common data range, or
    /// None when the fits do not intersect there.
    pub crossings: Vec<(usize, usize, Option<f64>)>,
    /// Linear fit of crossing vs 1/d_small: crossing ≈ intercept + slope/d.
    pub slope: f64,
    /// Extrapolated crossing at 1/d → 0.
    pub intercept: f64,
    /// Number of crossings that entered the line fit.
    pub used_pairs: usize,
}

/// Fit a quadratic per distance, intersect consecutive pairs, and
/// extrapolate the crossing abscissae linearly in 1/d to the 1/d → 0 limit.
pub fn diamond_intersection_analysis(
    curves: &[(usize, Vec<(f64, f64)>)],
) -> Result<DiamondAnalysis, FitError> {
    if curves.len() < 4 {
        return Err(FitError::BadInput(format!(
            "need at least 4 code distances, got {}",
            curves.len()
        )));
    }
    let mut sorted: Vec<&(usize, Vec<(f64, f64)>)> = curves.iter().collect();
    sorted.sort_by_key(|&&(d, _)| d);
    let mut fits = Vec::with_capacity(sorted.len());
    for &&(d, ref pts) in &sorted {
        if pts.len() < 3 {
            return Err(FitError::BadInput(format!(
                "distance {d} has fewer than 3 points"
            )));
        }
        let coeffs = quadratic_fit(pts).ok_or_else(|| {
            FitError::BadInput(format!("degenerate quadratic fit at distance {d}"))
        })?;
        let lo = pts.iter().map(|pt| pt.0).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|pt| pt.0).fold(f64::NEG_INFINITY, f64::max);
        fits.push((d, coeffs, lo, hi));
    }

    let mut crossings = Vec::new();
    for w in fits.windows(2) {
        let (d1, c1, lo1, hi1) = w[0];
        let (d2, c2, lo2, hi2) = w[1];
        let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
        let diff = [c1[0] - c2[0], c1[1] - c2[1], c1[2] - c2[2]];
        let root = quadratic_roots(diff[2], diff[1], diff[0])
            .into_iter()
            .filter(|r| (lo..=hi).contains(r))
            .min_by(f64::total_cmp);
        crossings.push((d1, d2, root));
    }

    // Line fit of crossing vs 1/d_small over the pairs that crossed.
    let samples: Vec<(f64, f64)> = crossings
        .iter()
        .filter_map(|&(d1, _, root)| root.map(|r| (1.0 / d1 as f64, r)))
        .collect();
    if samples.len() < 2 {
        return Err(FitError::BadInput(
            "fewer than 2 pairwise crossings found; cannot extrapolate".into(),
        ));
    }
    let n = samples.len() as f64;
    let sx: f64 = samples.iter().map(|s| s.0).sum();
    let sy: f64 = samples.iter().map(|s| s.1).sum();
    let sxx: f64 = samples.iter().map(|s| s.0 * s.0).sum();
    let sxy: f64 = samples.iter().map(|s| s.0 * s.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-30 {
        return Err(FitError::BadInput("crossing abscissae are degenerate".into()));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy * sxx - sx * sxy) / det;

    Ok(DiamondAnalysis {
        crossings,
        slope,
        intercept,
        used_pairs: samples.len(),
    })
}

/// Least-squares quadratic a0 + a1·p + a2·p² through (p, value) points.
fn quadratic_fit(points: &[(f64, f64)]) -> Option<[f64; 3]> {
    let mut m = vec![vec![0.0f64; 3]; 3];
    let mut v = vec![0.0f64; 3];
    for &(p, y) in points {
        let phi = [1.0, p, p * p];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += phi[r] * phi[c];
            }
            v[r] += phi[r] * y;
        }
    }
    solve_linear(&m, &v).map(|s| [s[0], s[1], s[2]])
}

/// Real roots of c2·x² + c1·x + c0 = 0, in the numerically stable form that
/// stays accurate when c2 is tiny (near-linear difference of two fits).
fn quadratic_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + c1.signum() * sq);
    let mut roots = Vec::new();
    if q != 0.0 {
        roots.push(c0 / q); // stable root for small c2
        roots.push(q / c2);
    } else {
        // c1 == 0: symmetric roots
        roots.push((sq / (2.0 * c2)).abs());
        roots.push(-(sq / (2.0 * c2)).abs());
    }
    roots.retain(|r| r.is_finite());
    roots
}

/// Solve A·x = b by Gaussian elimination with partial pivoting.
fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            #[allow(clippy::needless_range_loop)] // reads m[col] while writing m[row]
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Invert a symmetric positive-definite-ish matrix by Gauss–Jordan.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let norm = m[col][col];
        for x in m[col].iter_mut() {
            *x /= norm;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row][col];
            #[allow(clippy::needless_range_loop)] // reads m[col] while writing m[row]
            for k in 0..2 * n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// How the infidelity behaves as the code distance grows at one (p, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalability {
    /// Significantly decreasing with d — below threshold.
    Scalable,
    /// Significantly increasing with d — above threshold.
    Unscalable,
    /// Neither trend is significant, or the trend reverses.
    Indeterminate,
}

/// One measured grid point for the threshold map.
#[derive(Debug, Clone, Copy)]
pub struct MapPoint {
    pub q: f64,
    pub p: f64,
    pub d: usize,
    pub p_l_i: f64,
    pub p_l_i_err: f64,
}

/// Threshold bracket for one readout-error rate.
#[derive(Debug, Clone)]
pub struct ThresholdBracket {
    pub q: f64,
    /// Largest flip rate classified scalable (below any unscalable one).
    pub lower: Option<f64>,
    /// Smallest flip rate classified unscalable.
    pub upper: Option<f64>,
    /// Classification of every scanned p, ascending.
    pub classes: Vec<(f64, Scalability)>,
}

/// Bracket the threshold for each readout rate by classifying every flip
/// rate through the d-dependence of the infidelity: scalable when the drop
/// from smallest to largest d is significant at 2σ with no significant
/// reversal, unscalable for the mirror case, indeterminate otherwise
/// (indeterminate points simply widen the bracket).
pub fn threshold_map(points: &[MapPoint]) -> Vec<ThresholdBracket> {
    let mut sorted: Vec<&MapPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.q.total_cmp(&b.q)
            .then(a.p.total_cmp(&b.p))
            .then(a.d.cmp(&b.d))
    });

    let mut brackets: Vec<ThresholdBracket> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let q = sorted[i].q;
        let mut classes = Vec::new();
        while i < sorted.len() && sorted[i].q == q {
            let p = sorted[i].p;
            let mut series: Vec<&MapPoint> = Vec::new();
            while i < sorted.len() && sorted[i].q == q && sorted[i].p == p {
                series.push(sorted[i]);
                i += 1;
            }
            assert!(
                series.len() >= 2,
                "threshold map needs at least two code distances per grid point"
            );
            classes.push((p, classify_series(&series)));
        }
        let upper = classes
            .iter()
            .find(|&&(_, c)| c == Scalability::Unscalable)
            .map(|&(p, _)| p);
        let lower = classes
            .iter()
            .filter(|&&(p, c)| {
                c == Scalability::Scalable && upper.is_none_or(|u| p < u)
            })
            .map(|&(p, _)| p)
            .next_back();
        brackets.push(ThresholdBracket {
            q,
            lower,
            upper,
            classes,
        });
    }
    brackets
}

fn classify_series(series: &[&MapPoint]) -> Scalability {
    let first = series[0];
    let last = series[series.len() - 1];
    let total = last.p_l_i - first.p_l_i;
    let total_sig =
        2.0 * (first.p_l_i_err.powi(2) + last.p_l_i_err.powi(2)).sqrt();
    let mut any_up = false;
    let mut any_down = false;
    for w in series.windows(2) {
        let t = w[1].p_l_i - w[0].p_l_i;
        let sig = 2.0 * (w[0].p_l_i_err.powi(2) + w[1].p_l_i_err.powi(2)).sqrt();
        if t > sig {
            any_up = true;
        }
        if t < -sig {
            any_down = true;
        }
    }
    if total < -total_sig && !any_up {
        Scalability::Scalable
    } else if total > total_sig && !any_down {
        Scalability::Unscalable
    } else {
        Scalability::Indeterminate
    }
}
