//! Space–time matching decoder for repeated stabilizer rounds with
//! unreliable measurement records.
//!
//! A shot consists of `rounds` consecutive X-face syndrome records. Readout
//! noise flips recorded outcomes in every round but the last (the final round
//! is trusted so that the decoded correction returns the state to the code
//! space). Detection events mark the face/round places where consecutive
//! records disagree; a minimum-weight perfect matching over the weighted
//! space–time graph pairs the events with each other or with the lateral
//! boundaries, and the space-like edges of the matched paths assemble the
//! Ẑ-correction string. Time-like edges are virtual: they repair the record,
//! not the state.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::lattice::CodePatch;
use crate::tolerances::SENTINEL_WEIGHT;
use crate::util::fold_angle;

/// Flip each recorded stabilizer outcome in rounds `1..rounds−1`
/// independently with probability `q`; the final round is copied verbatim.
///
/// Input and output are per-round X-face defect patterns (true = −1 record).
pub fn apply_readout_noise<R: Rng>(
    syndromes: &[Vec<bool>],
    q: f64,
    rng: &mut R,
) -> Vec<Vec<bool>> {
    assert!((0.0..0.5).contains(&q), "readout-error rate must lie in [0, 0.5), got {q}");
    let mut noisy = syndromes.to_vec();
    if q == 0.0 {
        return noisy;
    }
    let rounds = noisy.len();
    for round in noisy.iter_mut().take(rounds.saturating_sub(1)) {
        for rec in round.iter_mut() {
            if rng.gen_bool(q) {
                *rec = !*rec;
            }
        }
    }
    noisy
}

/// Detection events of a recorded history: (face, round) pairs, 1-based
/// rounds, marked wherever a record differs from the previous round's record
/// (round 1 is compared against the trivial all-+1 initialization).
pub fn detection_events(noisy: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let mut events = Vec::new();
    let n_faces = noisy.first().map_or(0, Vec::len);
    let mut prev = vec![false; n_faces];
    for (t, round) in noisy.iter().enumerate() {
        assert_eq!(round.len(), n_faces, "ragged syndrome record");
        for (f, &rec) in round.iter().enumerate() {
            if rec != prev[f] {
                events.push((f, t + 1));
            }
        }
        prev.copy_from_slice(round);
    }
    events
}

/// One endpoint of a matched path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// A detection event at (x-face index, 1-based round).
    Event { face: usize, round: usize },
    /// The lateral boundary on the column-0 side.
    Left,
    /// The lateral boundary on the column-(d−1) side.
    Right,
}

/// Decoded output: the Ẑ string, the matched pairing for audit, and the
/// total matched path weight.
#[derive(Clone, Debug)]
pub struct Correction {
    /// Per-qubit Ẑ support of the correction.
    pub z_support: Vec<bool>,
    /// The matched endpoint pairs (boundary-absorbed events included).
    pub matched_pairs: Vec<(Endpoint, Endpoint)>,
    /// Sum of the matched shortest-path weights.
    pub total_weight: f64,
}

#[derive(Clone, Copy)]
struct GraphEdge {
    to: usize,
    weight: f64,
    /// Data qubit crossed by a space-like edge; `None` for time-like edges.
    qubit: Option<usize>,
}

#[derive(Clone, Copy)]
struct Hop {
    prev: usize,
    qubit: Option<usize>,
}

/// Weighted space–time graph for one (patch, rounds, p, q) configuration.
///
/// Vertices are (x-face, round) pairs for rounds `1..=rounds`, plus two
/// lateral boundary vertices. Space-like edges (one per data qubit per
/// round) carry weight `w_s = ln((1−p)/p)`; qubits adjacent to a single
/// X face connect that face to the left (column 0) or right (column d−1)
/// boundary. Time-like edges (f, t)–(f, t+1) carry `w_t = ln((1−q)/q)`.
/// A rate of exactly 0 stores the large sentinel weight and excludes the
/// whole edge class from path finding.
pub struct DetectionGraph {
    rounds: usize,
    n_faces: usize,
    n_qubits: usize,
    w_s: f64,
    w_t: f64,
    adj: Vec<Vec<GraphEdge>>,
    left: usize,
    right: usize,
    /// X faces of each qubit, cloned from the patch for consistency checks.
    qubit_x_faces: Vec<Vec<usize>>,
}

impl DetectionGraph {
    /// Build the graph for error rates `p` (data Ẑ flips per qubit per
    /// round) and `q` (record flips). Both must lie in [0, ½); a rate of 0
    /// excludes its edge class (sentinel weight retained for reporting).
    pub fn new(patch: &CodePatch, rounds: usize, p: f64, q: f64) -> Self {
        assert!((0.0..0.5).contains(&p), "data-error rate must lie in [0, 0.5), got {p}");
        assert!((0.0..0.5).contains(&q), "readout-error rate must lie in [0, 0.5), got {q}");
        let (w_s, use_spacelike) =
            if p == 0.0 { (SENTINEL_WEIGHT, false) } else { (((1.0 - p) / p).ln(), true) };
        let (w_t, use_timelike) =
            if q == 0.0 { (SENTINEL_WEIGHT, false) } else { (((1.0 - q) / q).ln(), true) };
        Self::build(patch, rounds, w_s, w_t, use_spacelike, use_timelike)
    }

    /// Graph with explicitly given positive edge weights (both classes
    /// included). Production graphs derive weights from rates via [`Self::new`].
    pub fn with_weights(patch: &CodePatch, rounds: usize, w_s: f64, w_t: f64) -> Self {
        assert!(w_s > 0.0 && w_t > 0.0, "edge weights must be positive");
        Self::build(patch, rounds, w_s, w_t, true, true)
    }

    fn build(
        patch: &CodePatch,
        rounds: usize,
        w_s: f64,
        w_t: f64,
        use_spacelike: bool,
        use_timelike: bool,
    ) -> Self {
        assert!(rounds >= 1, "need at least one measurement round");
        let n_faces = patch.x_faces.len();
        let n_qubits = patch.n_qubits();
        let left = rounds * n_faces;
        let right = left + 1;
        let mut adj: Vec<Vec<GraphEdge>> = vec![Vec::new(); rounds * n_faces + 2];
        let link = |adj: &mut Vec<Vec<GraphEdge>>, u: usize, v: usize, w: f64, qb| {
            adj[u].push(GraphEdge { to: v, weight: w, qubit: qb });
            adj[v].push(GraphEdge { to: u, weight: w, qubit: qb });
        };
        if use_spacelike {
            for t in 1..=rounds {
                for qb in 0..n_qubits {
                    let faces = &patch.qubit_x_faces[qb];
                    match faces[..] {
                        [a, b] => {
                            let (u, v) = ((t - 1) * n_faces + a, (t - 1) * n_faces + b);
                            link(&mut adj, u, v, w_s, Some(qb));
                        }
                        [a] => {
                            let u = (t - 1) * n_faces + a;
                            let b = if patch.col(qb) == 0 { left } else { right };
                            link(&mut adj, u, b, w_s, Some(qb));
                        }
                        _ => unreachable!("every qubit touches one or two X faces"),
                    }
                }
            }
        }
        if use_timelike {
            for t in 1..rounds {
                for f in 0..n_faces {
                    let (u, v) = ((t - 1) * n_faces + f, t * n_faces + f);
                    link(&mut adj, u, v, w_t, None);
                }
            }
        }
        DetectionGraph {
            rounds,
            n_faces,
            n_qubits,
            w_s,
            w_t,
            adj,
            left,
            right,
            qubit_x_faces: patch.qubit_x_faces.clone(),
        }
    }

    /// Space-like edge weight (sentinel when p = 0).
    pub fn spacelike_weight(&self) -> f64 {
        self.w_s
    }

    /// Time-like edge weight (sentinel when q = 0).
    pub fn timelike_weight(&self) -> f64 {
        self.w_t
    }

    /// Number of measurement rounds the graph covers.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn vertex(&self, face: usize, round: usize) -> usize {
        debug_assert!(face < self.n_faces && (1..=self.rounds).contains(&round));
        (round - 1) * self.n_faces + face
    }

    /// Dijkstra from `src`. Boundary vertices absorb: paths never continue
    /// through them, so face–face distances are boundary-avoiding geodesics.
    fn shortest_paths(&self, src: usize) -> (Vec<f64>, Vec<Hop>) {
        let nv = self.adj.len();
        let mut dist = vec![f64::INFINITY; nv];
        let mut hops = vec![Hop { prev: usize::MAX, qubit: None }; nv];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapEntry { dist: 0.0, v: src });
        while let Some(HeapEntry { dist: du, v: u }) = heap.pop() {
            if du > dist[u] || u == self.left || u == self.right {
                continue;
            }
            for e in &self.adj[u] {
                let nd = du + e.weight;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    hops[e.to] = Hop { prev: u, qubit: e.qubit };
                    heap.push(HeapEntry { dist: nd, v: e.to });
                }
            }
        }
        (dist, hops)
    }
}

/// Min-heap entry ordered by distance (vertex index breaks exact ties so the
/// pop order is fully deterministic).
struct HeapEntry {
    dist: f64,
    v: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest distance.
        other.dist.total_cmp(&self.dist).then_with(|| other.v.cmp(&self.v))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn walk_path(hops: &[Hop], src: usize, target: usize, z: &mut [bool]) {
    let mut v = target;
    while v != src {
        let h = hops[v];
        assert!(h.prev != usize::MAX, "matched vertex must be reachable from its partner");
        if let Some(qb) = h.qubit {
            z[qb] = !z[qb];
        }
        v = h.prev;
    }
}

/// Match the detection events pairwise or to the lateral boundaries with
/// minimum total path weight, and assemble the Ẑ support of the matched
/// space-like edges.
///
/// Events are processed in (face, round) order; equal-weight alternatives
/// resolve deterministically (fixed heap and matching pivot order), and a
/// boundary tie prefers the left side. The resulting support is always
/// checked to flip exactly the final round's recorded defects, which is what
/// returns the state to the code space when the last round is noiseless.
pub fn mwpm_decode(graph: &DetectionGraph, events: &[(usize, usize)]) -> Correction {
    let mut defects = events.to_vec();
    defects.sort_unstable();
    defects.dedup();
    assert_eq!(defects.len(), events.len(), "duplicate detection events");
    let k = defects.len();
    let mut z = vec![false; graph.n_qubits];
    let mut matched_pairs = Vec::new();
    let mut total_weight = 0.0;

    if k > 0 {
        // Shortest-path tree from every defect.
        let trees: Vec<(Vec<f64>, Vec<Hop>)> = defects
            .iter()
            .map(|&(f, t)| graph.shortest_paths(graph.vertex(f, t)))
            .collect();
        // Matching instance: defect i is node i, its boundary proxy is node
        // k+i. Proxy–proxy edges cost nothing, so boundary absorption never
        // blocks parity.
        let mut edges: Vec<mwpm::Edge> = Vec::new();
        let mut boundary_side = vec![Endpoint::Left; k];
        for i in 0..k {
            let dist_i = &trees[i].0;
            for (j, &(f, t)) in defects.iter().enumerate().skip(i + 1) {
                let dij = dist_i[graph.vertex(f, t)];
                if dij.is_finite() {
                    edges.push((i, j, dij));
                }
                edges.push((k + i, k + j, 0.0));
            }
            let (dl, dr) = (dist_i[graph.left], dist_i[graph.right]);
            let db = dl.min(dr);
            if db.is_finite() {
                edges.push((i, k + i, db));
                boundary_side[i] = if dl <= dr { Endpoint::Left } else { Endpoint::Right };
            }
        }
        let pairs = mwpm::min_weight_perfect_matching(2 * k, &edges)
            .expect("detection events admit a matching (boundaries absorb odd parity)");
        for (a, b) in pairs {
            if a >= k {
                continue; // proxy–proxy: parity bookkeeping only
            }
            let (dist_a, hops_a) = &trees[a];
            let src = graph.vertex(defects[a].0, defects[a].1);
            let ep_a = Endpoint::Event { face: defects[a].0, round: defects[a].1 };
            if b < k {
                let target = graph.vertex(defects[b].0, defects[b].1);
                total_weight += dist_a[target];
                walk_path(hops_a, src, target, &mut z);
                matched_pairs
                    .push((ep_a, Endpoint::Event { face: defects[b].0, round: defects[b].1 }));
            } else {
                assert_eq!(b, k + a, "boundary proxies pair only with their own defect");
                let bv = if boundary_side[a] == Endpoint::Left { graph.left } else { graph.right };
                total_weight += dist_a[bv];
                walk_path(hops_a, src, bv, &mut z);
                matched_pairs.push((ep_a, boundary_side[a]));
            }
        }
    }

    // Code-space return: the support must flip exactly the faces whose event
    // count over all rounds is odd — the final round's recorded defects.
    let mut produced = vec![false; graph.n_faces];
    for (qb, &on) in z.iter().enumerate() {
        if on {
            for &f in &graph.qubit_x_faces[qb] {
                produced[f] = !produced[f];
            }
        }
    }
    let mut wanted = vec![false; graph.n_faces];
    for &(f, _) in &defects {
        wanted[f] = !wanted[f];
    }
    assert_eq!(produced, wanted, "correction must return the final round to the code space");

    Correction { z_support: z, matched_pairs, total_weight }
}

/// Canonical single-round corrector: minimum-weight matching of a 2D
/// syndrome on a one-round graph. Returns the Ẑ support whose syndrome
/// equals `s`.
pub fn decode2d(graph_one_round: &DetectionGraph, s: &[bool]) -> Vec<bool> {
    assert_eq!(graph_one_round.rounds, 1, "canonical 2D decoding uses a one-round graph");
    assert_eq!(s.len(), graph_one_round.n_faces);
    let events: Vec<(usize, usize)> =
        s.iter().enumerate().filter(|&(_, &on)| on).map(|(f, _)| (f, 1)).collect();
    mwpm_decode(graph_one_round, &events).z_support
}

/// Class of the combined correction (decoded support ⊕ the canonical
/// correction of the final noiseless round): `false` = acts as identity on
/// the code space, `true` = acts as the logical Ẑ.
pub fn combined_class(
    patch: &CodePatch,
    decoded: &Correction,
    final_correction: &[bool],
) -> bool {
    let mut total = decoded.z_support.clone();
    for (qb, &on) in final_correction.iter().enumerate() {
        if on {
            total[qb] = !total[qb];
        }
    }
    let syn = patch.syndrome_of_support(&total);
    assert!(syn.iter().all(|&f| !f), "combined correction must have a trivial syndrome");
    patch.logical_class(&total)
}

/// Final logical angle: the accumulated angle, advanced by π/2 when the
/// combined correction acts as the logical Ẑ, folded into (−π/2, π/2].
pub fn final_angle(theta_star: f64, logical_z: bool) -> f64 {
    fold_angle(theta_star + if logical_z { FRAC_PI_2 } else { 0.0 })
}

/// One readout resample of a sampled noiseless shot: flip the records,
/// match the detection events, and return the final folded logical angle.
pub fn resample_final_angle<R: Rng>(
    patch: &CodePatch,
    graph: &DetectionGraph,
    record: &crate::sampler::RoundsRecord,
    q: f64,
    rng: &mut R,
) -> f64 {
    let noisy = apply_readout_noise(&record.syndromes, q, rng);
    let events = detection_events(&noisy);
    let decoded = mwpm_decode(graph, &events);
    let class = combined_class(patch, &decoded, &record.final_correction);
    final_angle(record.theta_star, class)
}
