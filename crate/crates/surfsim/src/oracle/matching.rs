//! Exhaustive reference for the space–time matcher.
//!
//! Rebuilds the detection graph independently from the patch geometry,
//! computes all-pairs shortest paths by Floyd–Warshall (instead of
//! per-source Dijkstra), and enumerates every pairing of the detection
//! events — pairwise or absorbed by a lateral boundary — to find the true
//! optimum. Intended for small event sets; the number of pairings grows
//! like the involution numbers, so ~14 events is the practical ceiling.

use crate::lattice::CodePatch;

/// All-pairs shortest-path table over one space–time configuration, with an
/// exhaustive minimum-pairing search on top.
pub struct ReferenceMatcher {
    n_faces: usize,
    rounds: usize,
    /// dist[u][v] over face–round vertices (boundary-avoiding paths).
    dist: Vec<Vec<f64>>,
    /// Cheapest connection from each vertex to either lateral boundary,
    /// and whether the left side realizes it.
    boundary: Vec<(f64, bool)>,
}

impl ReferenceMatcher {
    /// Build the table for `rounds` rounds at data-error rate `p` and
    /// record-error rate `q`; a rate of 0 removes its edge class.
    pub fn new(patch: &CodePatch, rounds: usize, p: f64, q: f64) -> Self {
        assert!((0.0..0.5).contains(&p) && (0.0..0.5).contains(&q));
        let n_faces = patch.x_faces.len();
        let nv = rounds * n_faces;
        let vid = |f: usize, t: usize| (t - 1) * n_faces + f;
        let mut dist = vec![vec![f64::INFINITY; nv]; nv];
        for (v, row) in dist.iter_mut().enumerate() {
            row[v] = 0.0;
        }
        // direct boundary hops: (cost, via-left)
        let mut boundary = vec![(f64::INFINITY, true); nv];
        if p > 0.0 {
            let w_s = ((1.0 - p) / p).ln();
            for t in 1..=rounds {
                for qb in 0..patch.n_qubits() {
                    match patch.qubit_x_faces[qb][..] {
                        [a, b] => {
                            let (u, v) = (vid(a, t), vid(b, t));
                            dist[u][v] = dist[u][v].min(w_s);
                            dist[v][u] = dist[u][v];
                        }
                        [a] => {
                            let u = vid(a, t);
                            let left = patch.col(qb) == 0;
                            if w_s < boundary[u].0 || (w_s == boundary[u].0 && left) {
                                boundary[u] = (w_s, left);
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
        if q > 0.0 {
            let w_t = ((1.0 - q) / q).ln();
            for t in 1..rounds {
                for f in 0..n_faces {
                    let (u, v) = (vid(f, t), vid(f, t + 1));
                    dist[u][v] = dist[u][v].min(w_t);
                    dist[v][u] = dist[u][v];
                }
            }
        }
        // Floyd–Warshall.
        for k in 0..nv {
            for i in 0..nv {
                let dik = dist[i][k];
                if !dik.is_finite() {
                    continue;
                }
                #[allow(clippy::needless_range_loop)] // reads dist[k] while writing dist[i]
                for j in 0..nv {
                    let through = dik + dist[k][j];
                    if through < dist[i][j] {
                        dist[i][j] = through;
                    }
                }
            }
        }
        // Cheapest boundary connection from anywhere: geodesic to any vertex
        // that has a direct boundary hop, plus that hop.
        let direct = boundary.clone();
        for v in 0..nv {
            for (u, &(hop, left)) in direct.iter().enumerate() {
                let total = dist[v][u] + hop;
                if total < boundary[v].0 {
                    boundary[v] = (total, left);
                }
            }
        }
        ReferenceMatcher { n_faces, rounds, dist, boundary }
    }

    fn vid(&self, f: usize, t: usize) -> usize {
        assert!(f < self.n_faces && (1..=self.rounds).contains(&t));
        (t - 1) * self.n_faces + f
    }

    /// Minimum total weight over all ways of pairing the events with each
    /// other or absorbing them at a boundary, and the parity of
    /// left-boundary absorptions of one optimal pairing (which is the
    /// logical class of the corresponding correction, since only
    /// column-0 qubits cross the left boundary).
    pub fn optimum(&self, events: &[(usize, usize)]) -> (f64, bool) {
        let verts: Vec<usize> = events.iter().map(|&(f, t)| self.vid(f, t)).collect();
        let mut used = vec![false; verts.len()];
        let (w, parity) = self.search(&verts, &mut used);
        assert!(w.is_finite(), "no feasible pairing for the given events");
        (w, parity)
    }

    fn search(&self, verts: &[usize], used: &mut [bool]) -> (f64, bool) {
        let Some(i) = (0..verts.len()).find(|&i| !used[i]) else {
            return (0.0, false);
        };
        used[i] = true;
        let mut best = f64::INFINITY;
        let mut best_parity = false;
        // absorb event i at its cheaper boundary
        let (bw, via_left) = self.boundary[verts[i]];
        if bw.is_finite() {
            let (rest, rest_parity) = self.search(verts, used);
            let total = bw + rest;
            if total < best {
                best = total;
                best_parity = rest_parity ^ via_left;
            }
        }
        // or pair it with any later unused event
        for j in (i + 1)..verts.len() {
            if used[j] {
                continue;
            }
            let dij = self.dist[verts[i]][verts[j]];
            if !dij.is_finite() {
                continue;
            }
            used[j] = true;
            let (rest, rest_parity) = self.search(verts, used);
            used[j] = false;
            let total = dij + rest;
            if total < best {
                best = total;
                best_parity = rest_parity;
            }
        }
        used[i] = false;
        (best, best_parity)
    }
}

/// Naive, self-contained re-implementation of the stochastic-noise model:
/// iid Ẑ flips per qubit per round, face parities computed directly from the
/// stabilizer supports, record flips on all but the final round, and the
/// exhaustive matcher above as the decoder. Returns the logical failure rate
/// and its binomial standard error.
///
/// Deliberately shares nothing with the production decoding path beyond the
/// patch geometry, so rate agreement is a genuine cross-check.
pub fn naive_model_failure_rate(
    patch: &CodePatch,
    rounds: usize,
    p: f64,
    q: f64,
    shots: usize,
    master_seed: u64,
) -> (f64, f64) {
    use rand::Rng;
    assert!(p > 0.0 && q > 0.0, "the exhaustive pairing needs both edge classes");
    let matcher = ReferenceMatcher::new(patch, rounds, p, q);
    let n = patch.n_qubits();
    let d = patch.d;
    let mut failures = 0usize;
    for shot in 0..shots {
        let mut rng = crate::util::shot_rng(master_seed, shot as u64);
        let mut cumulative = vec![false; n];
        let mut records: Vec<Vec<bool>> = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            for flip in cumulative.iter_mut() {
                *flip ^= rng.gen_bool(p);
            }
            let parities: Vec<bool> = patch
                .x_faces
                .iter()
                .map(|face| {
                    face.qubits
                        .iter()
                        .fold(false, |acc, &qb| acc ^ cumulative[qb])
                })
                .collect();
            records.push(parities);
        }
        for record in records.iter_mut().take(rounds - 1) {
            for bit in record.iter_mut() {
                *bit ^= rng.gen_bool(q);
            }
        }
        let mut events = Vec::new();
        let mut previous = vec![false; patch.x_faces.len()];
        for (t, record) in records.iter().enumerate() {
            for (f, (&now, &before)) in record.iter().zip(previous.iter()).enumerate() {
                if now != before {
                    events.push((f, t + 1));
                }
            }
            previous.clone_from(record);
        }
        let (_, correction_class) = matcher.optimum(&events);
        let error_class = (0..d).fold(false, |acc, row| acc ^ cumulative[row * d]);
        if correction_class != error_class {
            failures += 1;
        }
    }
    let rate = failures as f64 / shots as f64;
    let err = (rate * (1.0 - rate) / shots as f64).sqrt();
    (rate, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_patch;

    #[test]
    fn single_defect_costs_one_boundary_hop() {
        let patch = build_patch(3);
        let reference = ReferenceMatcher::new(&patch, 1, 0.05, 0.0);
        let w_s = (0.95f64 / 0.05).ln();
        // face 0 = (0,1): one hop to the left boundary through qubit 0.
        let (w, left_parity) = reference.optimum(&[(0, 1)]);
        assert!((w - w_s).abs() < 1e-12);
        assert!(left_parity);
        // face 1 = (1,2): one hop to the right boundary (qubits 2/5).
        let (w, left_parity) = reference.optimum(&[(1, 1)]);
        assert!((w - w_s).abs() < 1e-12);
        assert!(!left_parity);
    }

    #[test]
    fn adjacent_defect_pair_prefers_the_shared_qubit() {
        let patch = build_patch(3);
        let reference = ReferenceMatcher::new(&patch, 1, 0.05, 0.0);
        let w_s = (0.95f64 / 0.05).ln();
        // faces (0,1) and (1,2) share qubit 1: pairing them crosses one
        // edge (w_s), beating the two boundary hops (2 w_s).
        let (w, left_parity) = reference.optimum(&[(0, 1), (1, 1)]);
        assert!((w - w_s).abs() < 1e-12, "shared-qubit pairing costs one edge, got {w}");
        assert!(!left_parity, "pairing crosses no boundary qubit");
    }

    #[test]
    fn record_pair_is_cheaper_in_time_when_records_are_noisier() {
        let patch = build_patch(3);
        // p = 0.02 < q = 0.10 means w_t < w_s: a same-face event pair in
        // consecutive rounds matches through time.
        let reference = ReferenceMatcher::new(&patch, 3, 0.02, 0.10);
        let w_t = (0.9f64 / 0.1).ln();
        let (w, left_parity) = reference.optimum(&[(2, 1), (2, 2)]);
        assert!((w - w_t).abs() < 1e-12);
        assert!(!left_parity);
    }
}
