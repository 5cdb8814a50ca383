//! Weighted matching in general undirected graphs.
//!
//! [`max_weight_matching`] computes a maximum-weight matching with the
//! primal-dual blossom method (Edmonds' algorithm, following the structure of
//! Galil's survey and Joris van Rantwijk's reference implementation), here
//! generalized to real-valued edge weights.  [`min_weight_perfect_matching`]
//! layers the usual weight-negation + maximum-cardinality reduction on top,
//! which is the form syndrome decoders consume.
//!
//! The solver runs in `O(V^3)` time.  After every solve it checks the
//! primal-dual optimality certificate (complementary slackness, with a small
//! floating-point tolerance) and panics if the certificate fails, so a buggy
//! result can never silently corrupt downstream statistics.
//!
//! For identical input (same edge list in the same order) the result is
//! deterministic, including tie-breaking between equal-weight matchings.

use std::fmt;

/// An undirected edge `(i, j, weight)` between distinct vertices `i != j`.
///
/// Vertices are consecutive non-negative integers.  At most one edge may
/// connect any given pair of vertices.
pub type Edge = (usize, usize, f64);

/// Marker for "no vertex / no edge" in the internal arrays.
const SENTINEL: usize = usize::MAX;

/// Error returned by [`min_weight_perfect_matching`] when the graph admits no
/// perfect matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoPerfectMatching {
    /// Number of vertices left uncovered by a maximum-cardinality matching.
    pub unmatched: usize,
}

impl fmt::Display for NoPerfectMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "graph has no perfect matching ({} vertices cannot be covered)",
            self.unmatched
        )
    }
}

impl std::error::Error for NoPerfectMatching {}

/// Compute a maximum-weight matching of the graph given by `edges`.
///
/// Returns `mate` such that `mate[v] == Some(w)` iff vertex `v` is matched to
/// vertex `w` (the relation is symmetric).  The vector covers vertices
/// `0..=max_vertex_index`; isolated vertices beyond that simply do not appear.
///
/// If `max_cardinality` is true, only matchings of maximum cardinality are
/// considered, and among those one of maximum weight is returned.  This mode
/// also makes negative edge weights useful: negating all weights and requiring
/// maximum cardinality yields a *minimum*-weight maximum-cardinality matching.
pub fn max_weight_matching(edges: &[Edge], max_cardinality: bool) -> Vec<Option<usize>> {
    if edges.is_empty() {
        return vec![];
    }
    let mate = Matcher::new(edges, max_cardinality).solve();
    mate.into_iter()
        .map(|m| if m == SENTINEL { None } else { Some(m) })
        .collect()
}

/// Compute the minimum-weight *perfect* matching on `n_vertices` vertices.
///
/// Every vertex in `0..n_vertices` must be covered; if that is impossible the
/// function reports how many vertices were left over.  Edge weights may be any
/// finite reals (negative weights are fine).  Returns the matched pairs as
/// `(i, j)` with `i < j`, sorted by `i`.
pub fn min_weight_perfect_matching(
    n_vertices: usize,
    edges: &[Edge],
) -> Result<Vec<(usize, usize)>, NoPerfectMatching> {
    if n_vertices == 0 {
        return Ok(vec![]);
    }
    for &(i, j, _) in edges {
        assert!(
            i < n_vertices && j < n_vertices,
            "edge ({i}, {j}) references a vertex >= n_vertices = {n_vertices}"
        );
    }
    // Among maximum-cardinality matchings the solver maximizes total weight,
    // so negating the weights selects the minimum-weight perfect matching
    // whenever a perfect matching exists.
    let negated: Vec<Edge> = edges.iter().map(|&(i, j, w)| (i, j, -w)).collect();
    let mate = max_weight_matching(&negated, true);

    let mut pairs = Vec::with_capacity(n_vertices / 2);
    let mut unmatched = 0;
    for v in 0..n_vertices {
        match mate.get(v).copied().flatten() {
            Some(w) if w > v => pairs.push((v, w)),
            Some(_) => {}
            None => unmatched += 1,
        }
    }
    if unmatched > 0 {
        return Err(NoPerfectMatching { unmatched });
    }
    Ok(pairs)
}

/// State of one blossom-algorithm run.
///
/// Vertices are numbered `0..nvertex`; non-trivial blossoms are numbered
/// `nvertex..2*nvertex`.  Edge endpoints are numbered `0..2*nedge` such that
/// endpoints `2*k` and `2*k + 1` belong to edge `k`; `endpoint[p]` is the
/// vertex to which endpoint `p` is attached, and `p ^ 1` is the opposite
/// endpoint of the same edge.
struct Matcher {
    nvertex: usize,
    nedge: usize,
    maxcardinality: bool,
    edges: Vec<Edge>,
    /// Absolute floating-point tolerance used for "is this dual/slack zero"
    /// decisions and for the optimality certificate, scaled to the weights.
    eps: f64,

    /// `endpoint[p]`: vertex attached to edge endpoint `p`.  Immutable.
    endpoint: Vec<usize>,
    /// `neighbend[v]`: list of remote endpoints of edges incident to `v`.
    /// Immutable.
    neighbend: Vec<Vec<usize>>,
    /// `mate[v]`: remote endpoint of `v`'s matched edge, or SENTINEL.
    mate: Vec<usize>,
    /// `label[b]` for a top-level blossom/vertex: 0 free, 1 = S, 2 = T.
    /// For a vertex `v` inside a T-blossom, `label[v] == 2` iff `v` is
    /// reachable from an S-vertex outside the blossom.  (During tracebacks the
    /// bit 4 is borrowed as a breadcrumb marker.)
    label: Vec<usize>,
    /// `labelend[b]`: remote endpoint of the edge through which `b` obtained
    /// its label, or SENTINEL.
    labelend: Vec<usize>,
    /// `inblossom[v]`: top-level blossom containing vertex `v`.
    inblossom: Vec<usize>,
    /// `blossomparent[b]`: immediate parent of sub-blossom `b`, or SENTINEL.
    blossomparent: Vec<usize>,
    /// `blossomchilds[b]`: ordered sub-blossoms of `b`, starting at the base
    /// and going round the cycle.
    blossomchilds: Vec<Vec<usize>>,
    /// `blossombase[b]`: base *vertex* of blossom `b`.
    blossombase: Vec<usize>,
    /// `blossomendps[b][i]`: local endpoint of `blossomchilds[b][i]` on the
    /// edge connecting it to `blossomchilds[b][i + 1]` (wrapping).
    blossomendps: Vec<Vec<usize>>,
    /// Least-slack edge to an S-blossom, per free vertex / top-level S-blossom.
    bestedge: Vec<usize>,
    /// For a non-trivial top-level S-blossom: least-slack edges to each
    /// neighbouring S-blossom (None = not computed yet).
    blossombestedges: Vec<Option<Vec<usize>>>,
    /// Blossom numbers currently available for new blossoms.
    unusedblossoms: Vec<usize>,
    /// `dualvar[v] = 2u(v)` for vertices, `dualvar[b] = z(b)` for blossoms.
    dualvar: Vec<f64>,
    /// `allowedge[k]`: edge `k` is known to have zero slack.
    allowedge: Vec<bool>,
    /// Queue of newly discovered S-vertices.
    queue: Vec<usize>,
}

impl Matcher {
    fn new(edges: &[Edge], maxcardinality: bool) -> Matcher {
        let nedge = edges.len();
        let mut nvertex = 0;
        let mut weight_scale = 0.0f64;
        for &(i, j, wt) in edges {
            assert!(i != j, "self-loop ({i}, {i}) is not allowed");
            assert!(wt.is_finite(), "edge ({i}, {j}) has non-finite weight {wt}");
            nvertex = nvertex.max(i + 1).max(j + 1);
            weight_scale = weight_scale.max(wt.abs());
        }
        let maxweight = edges
            .iter()
            .map(|e| e.2)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);

        let endpoint = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![vec![]; nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }

        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(std::iter::repeat_n(0.0, nvertex));

        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(std::iter::repeat_n(SENTINEL, nvertex));

        Matcher {
            nvertex,
            nedge,
            maxcardinality,
            edges: edges.to_vec(),
            eps: 1e-9 * weight_scale.max(1.0),
            endpoint,
            neighbend,
            mate: vec![SENTINEL; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![SENTINEL; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![SENTINEL; 2 * nvertex],
            blossomchilds: vec![vec![]; 2 * nvertex],
            blossombase,
            blossomendps: vec![vec![]; 2 * nvertex],
            bestedge: vec![SENTINEL; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: vec![],
        }
    }

    /// Twice the slack of edge `k` (not meaningful for edges inside blossoms).
    #[inline]
    fn slack(&self, k: usize) -> f64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2.0 * wt
    }

    /// All leaf vertices of blossom `b`.
    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut leaves = vec![];
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.nvertex {
                leaves.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().copied());
            }
        }
        leaves
    }

    /// Assign label `t` to the top-level blossom containing vertex `w`,
    /// reached through the edge with remote endpoint `p`.
    fn assign_label(&mut self, w: usize, t: usize, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = SENTINEL;
        self.bestedge[b] = SENTINEL;
        if t == 1 {
            // b became an S-blossom; scan its vertices.
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            // b became a T-blossom; its base's mate becomes an S-vertex.
            // (Only the base of a blossom has an external mate.)
            let base = self.blossombase[b];
            let mate_base = self.mate[base];
            debug_assert!(mate_base != SENTINEL);
            self.assign_label(self.endpoint[mate_base], 1, mate_base ^ 1);
        }
    }

    /// Trace back from S-vertices `v` and `w` to discover either a new
    /// blossom (returning its base vertex) or an augmenting path (returning
    /// SENTINEL).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = vec![];
        let mut base = SENTINEL;
        let mut v = v;
        let mut w = w;
        while v != SENTINEL || w != SENTINEL {
            // Look for a breadcrumb in v's blossom, or put a new breadcrumb.
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert!(self.label[b] == 1);
            path.push(b);
            self.label[b] = 5;
            // Trace one step back.
            debug_assert!(self.labelend[b] == self.mate[self.blossombase[b]]);
            if self.labelend[b] == SENTINEL {
                // The base of blossom b is single; stop tracing this path.
                v = SENTINEL;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert!(self.label[b] == 2);
                // b is a T-blossom; trace one more step back.
                debug_assert!(self.labelend[b] != SENTINEL);
                v = self.endpoint[self.labelend[b]];
            }
            // Alternate between both paths.
            if w != SENTINEL {
                std::mem::swap(&mut v, &mut w);
            }
        }
        // Remove breadcrumbs.
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Construct a new blossom with the given base, containing edge `k` which
    /// connects a pair of S-vertices.  Label the new blossom as S; set its
    /// dual variable to zero; relabel its T-vertices to S.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];

        let b = self.unusedblossoms.pop().expect("ran out of blossom slots");
        self.blossombase[b] = base;
        self.blossomparent[b] = SENTINEL;
        self.blossomparent[bb] = b;

        let mut path = vec![];
        let mut endps = vec![];

        // Trace back from v to base.
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(
                self.label[bv] == 2
                    || (self.label[bv] == 1
                        && self.labelend[bv] == self.mate[self.blossombase[bv]])
            );
            debug_assert!(self.labelend[bv] != SENTINEL);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);

        // Trace back from w to base.
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(
                self.label[bw] == 2
                    || (self.label[bw] == 1
                        && self.labelend[bw] == self.mate[self.blossombase[bw]])
            );
            debug_assert!(self.labelend[bw] != SENTINEL);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossomchilds[b] = path;
        self.blossomendps[b] = endps;

        debug_assert!(self.label[bb] == 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0.0;

        // Relabel vertices.
        for v in self.blossom_leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                // This T-vertex now turns into an S-vertex because it becomes
                // part of an S-blossom; add it to the queue.
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // Compute the least-slack edges to each neighbouring S-blossom.
        let mut bestedgeto = vec![SENTINEL; 2 * self.nvertex];
        for bv in self.blossomchilds[b].clone() {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                // Walk this sub-blossom's least-slack edges.
                Some(bbe) => vec![bbe],
                // This sub-blossom has no list of least-slack edges; get the
                // information from its vertices.
                None => self
                    .blossom_leaves(bv)
                    .iter()
                    .map(|&v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    // Orient the edge so that j is the endpoint outside b.
                    let (i, j, _) = self.edges[k];
                    let j = if self.inblossom[j] == b { i } else { j };
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == SENTINEL
                            || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            // Forget about least-slack edges of the sub-blossom.
            self.bestedge[bv] = SENTINEL;
        }
        self.blossombestedges[b] = Some(
            bestedgeto
                .into_iter()
                .filter(|&k| k != SENTINEL)
                .collect::<Vec<_>>(),
        );

        // Select bestedge[b].
        self.bestedge[b] = SENTINEL;
        for &k in self.blossombestedges[b].as_ref().unwrap() {
            if self.bestedge[b] == SENTINEL || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    /// Expand the given top-level blossom.  During a stage (`endstage ==
    /// false`) a T-blossom's sub-blossoms must be relabeled along the path
    /// through which the blossom obtained its label.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        // Convert sub-blossoms into top-level blossoms.
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = SENTINEL;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s].abs() <= self.eps {
                // Recursively expand this sub-blossom.
                self.expand_blossom(s, endstage);
            } else {
                for v in self.blossom_leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }

        if !endstage && self.label[b] == 2 {
            // Start at the sub-blossom through which the expanding blossom
            // obtained its label, and relabel sub-blossoms until we reach the
            // base.
            debug_assert!(self.labelend[b] != SENTINEL);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];

            // Decide in which direction to go round the blossom.
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .unwrap() as i64;
            let (jstep, endptrick): (i64, usize) = if j & 1 != 0 {
                // Start index is odd; go forward and wrap.
                j -= self.blossomchilds[b].len() as i64;
                (1, 0)
            } else {
                // Start index is even; go backward.
                (-1, 1)
            };

            // Move along the blossom until we get to the base.
            let mut p = self.labelend[b];
            while j != 0 {
                // Relabel the T-sub-blossom.
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = wrap_index(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
                self.label[self.endpoint[q ^ 1]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);

                // Step to the next S-sub-blossom and note its forward endpoint.
                self.allowedge
                    [wrap_index(&self.blossomendps[b], j - endptrick as i64) / 2] = true;
                j += jstep;
                p = wrap_index(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;

                // Step to the next T-sub-blossom.
                self.allowedge[p / 2] = true;
                j += jstep;
            }

            // Relabel the base T-sub-blossom WITHOUT stepping through to its
            // mate (so don't call assign_label).
            let bv = wrap_index(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = SENTINEL;

            // Continue along the blossom until we get back to entrychild.
            j += jstep;
            while wrap_index(&self.blossomchilds[b], j) != entrychild {
                // Examine the vertices of the sub-blossom to see whether it is
                // reachable from a neighbouring S-vertex outside the expanding
                // blossom.
                let bv = wrap_index(&self.blossomchilds[b], j);
                if self.label[bv] == 1 {
                    // This sub-blossom just got label S through one of its
                    // neighbours; leave it.
                    j += jstep;
                    continue;
                }
                let mut v = SENTINEL;
                for leaf in self.blossom_leaves(bv) {
                    v = leaf;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                // If the sub-blossom contains a reachable vertex, assign label
                // T to the sub-blossom.
                if v != SENTINEL && self.label[v] != 0 {
                    debug_assert!(self.label[v] == 2);
                    debug_assert!(self.inblossom[v] == bv);
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let lblend = self.labelend[v];
                    self.assign_label(v, 2, lblend);
                }
                j += jstep;
            }
        }

        // Recycle the blossom number.
        self.label[b] = 0;
        self.labelend[b] = SENTINEL;
        self.blossombase[b] = SENTINEL;
        self.bestedge[b] = SENTINEL;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombestedges[b] = None;
        self.unusedblossoms.push(b);
    }

    /// Swap matched/unmatched edges over an alternating path through blossom
    /// `b` between vertex `v` and the base vertex.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        // Bubble up through the blossom tree from vertex v to an immediate
        // sub-blossom of b.
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        // Recursively deal with the first sub-blossom.
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }

        // Decide in which direction to go round the blossom.
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as i64;
        let (jstep, endptrick): (i64, usize) = if i & 1 != 0 {
            // Start index is odd; go forward and wrap.
            j -= self.blossomchilds[b].len() as i64;
            (1, 0)
        } else {
            // Start index is even; go backward.
            (-1, 1)
        };

        // Move along the blossom until we get to the base.
        while j != 0 {
            // Step to the next sub-blossom and augment it recursively.
            j += jstep;
            let t = wrap_index(&self.blossomchilds[b], j);
            let p = wrap_index(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            // Step to the next sub-blossom and augment it recursively.
            j += jstep;
            let t = wrap_index(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            // Match the edge connecting those sub-blossoms.
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }

        // Rotate the list of sub-blossoms to put the new base at the front.
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert!(self.blossombase[b] == v);
    }

    /// Swap matched/unmatched edges over an alternating path between two
    /// single vertices.  The augmenting path runs through edge `k`, which
    /// connects a pair of S-vertices.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            // Match vertex s to remote endpoint p, then trace back from s
            // until we find a single vertex, swapping matched and unmatched
            // edges as we go.
            loop {
                let bs = self.inblossom[s];
                debug_assert!(self.label[bs] == 1);
                debug_assert!(self.labelend[bs] == self.mate[self.blossombase[bs]]);
                // Augment through the S-blossom from s to base.
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                // Trace one step back.
                if self.labelend[bs] == SENTINEL {
                    // Reached a single vertex; stop.
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert!(self.label[bt] == 2);
                debug_assert!(self.labelend[bt] != SENTINEL);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                // Augment through the T-blossom from j to base.
                debug_assert!(self.blossombase[bt] == t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                // Keep the opposite endpoint; it will be assigned to mate[s]
                // in the next step.
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Check the primal-dual optimality certificate (complementary
    /// slackness), up to the floating-point tolerance.  Must run before the
    /// final mate[] transformation.  Panics on violation.
    fn verify_optimum(&self) {
        let tol = 10.0 * self.eps;
        let min_vertex_dual = self.dualvar[..self.nvertex]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let vdualoffset = if self.maxcardinality {
            // Vertices may have negative dual; shift them all up.
            (-min_vertex_dual).max(0.0)
        } else {
            0.0
        };
        // All dual variables are non-negative.
        assert!(min_vertex_dual + vdualoffset >= -tol, "negative vertex dual");
        let min_blossom_dual = self.dualvar[self.nvertex..]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min_blossom_dual >= -tol, "negative blossom dual");

        // All edges have non-negative slack, and all matched edges have zero
        // slack (counting the duals of shared blossoms).
        for k in 0..self.nedge {
            let (i, j, _) = self.edges[k];
            let mut s = self.slack(k);
            let mut iblossoms = vec![i];
            while self.blossomparent[*iblossoms.last().unwrap()] != SENTINEL {
                iblossoms.push(self.blossomparent[*iblossoms.last().unwrap()]);
            }
            let mut jblossoms = vec![j];
            while self.blossomparent[*jblossoms.last().unwrap()] != SENTINEL {
                jblossoms.push(self.blossomparent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2.0 * self.dualvar[bi];
            }
            assert!(s >= -tol, "edge {k} has negative slack {s}");
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                assert!(s.abs() <= tol, "matched edge {k} has nonzero slack {s}");
            }
        }
        // All single vertices have (offset) zero dual value.
        for v in 0..self.nvertex {
            assert!(
                self.mate[v] != SENTINEL || (self.dualvar[v] + vdualoffset).abs() <= tol,
                "single vertex {v} has nonzero dual"
            );
        }
        // All blossoms with positive dual value are full.
        for b in self.nvertex..2 * self.nvertex {
            if self.blossombase[b] != SENTINEL && self.dualvar[b] > tol {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert!(self.mate[self.endpoint[p]] == p ^ 1);
                        assert!(self.mate[self.endpoint[p ^ 1]] == p);
                    }
                }
            }
        }
    }

    /// Run the algorithm and return `mate` (vertex-indexed, SENTINEL =
    /// unmatched).
    fn solve(mut self) -> Vec<usize> {
        // Main loop: continue until no further improvement is possible.
        for _ in 0..self.nvertex {
            // Each iteration of this loop is a "stage": find an augmenting
            // path and use it to improve the matching.
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = SENTINEL);
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b] = None;
            }
            // Loss of labeling means that we can not be sure that currently
            // allowable edges remain allowable throughout this stage.
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();

            // Label single blossoms/vertices with S and put them in the queue.
            for v in 0..self.nvertex {
                if self.mate[v] == SENTINEL && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, SENTINEL);
                }
            }

            let mut augmented = false;
            loop {
                // Each iteration of this loop is a "substage": try to find an
                // augmenting path; if none exists, use the primal-dual method
                // to pump some slack out of the dual variables.

                // Continue labeling until all vertices reachable through an
                // alternating path have got a label.
                'queue: while !self.queue.is_empty() && !augmented {
                    let v = self.queue.pop().unwrap();
                    debug_assert!(self.label[self.inblossom[v]] == 1);
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            // This edge is internal to a blossom; ignore it.
                            continue;
                        }
                        let mut kslack = 0.0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0.0 {
                                // Edge k has zero slack: it is allowable.
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                // (C1) w is a free vertex; label w with T and
                                // label its mate with S.
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                // (C2) w is an S-vertex (not in the same
                                // blossom); follow back-links to discover
                                // either an augmenting path or a new blossom.
                                let base = self.scan_blossom(v, w);
                                if base != SENTINEL {
                                    // Found a new blossom; add it to the
                                    // blossom bookkeeping and turn it into an
                                    // S-blossom.
                                    self.add_blossom(base, k);
                                } else {
                                    // Found an augmenting path; augment the
                                    // matching and end this stage.
                                    self.augment_matching(k);
                                    augmented = true;
                                    break 'queue;
                                }
                            } else if self.label[w] == 0 {
                                // w is inside a T-blossom, but w itself has
                                // not yet been reached from outside the
                                // blossom; mark it as reached (needed for
                                // relabeling during T-blossom expansion).
                                debug_assert!(self.label[self.inblossom[w]] == 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            // Keep track of the least-slack non-allowable edge
                            // to a different S-blossom.
                            let b = self.inblossom[v];
                            if self.bestedge[b] == SENTINEL
                                || kslack < self.slack(self.bestedge[b])
                            {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0 {
                            // w is a free vertex (or an unreached vertex
                            // inside a T-blossom) but we can not reach it yet;
                            // keep track of the least-slack edge that reaches w.
                            if self.bestedge[w] == SENTINEL
                                || kslack < self.slack(self.bestedge[w])
                            {
                                self.bestedge[w] = k;
                            }
                        }
                    }
                }
                if augmented {
                    break;
                }

                // There is no augmenting path under these constraints;
                // compute delta and reduce slack in the optimization problem.
                // (Vertex dual variables, edge slacks and deltas are
                // pre-multiplied by two.)
                let mut deltatype = -1;
                let mut delta = 0.0;
                let mut deltaedge = SENTINEL;
                let mut deltablossom = SENTINEL;

                if !self.maxcardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min);
                }

                // Delta 2: the minimum slack on any edge between an S-vertex
                // and a free vertex.
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != SENTINEL {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }

                // Delta 3: half the minimum slack on any edge between a pair
                // of S-blossoms.
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == SENTINEL
                        && self.label[b] == 1
                        && self.bestedge[b] != SENTINEL
                    {
                        let d = self.slack(self.bestedge[b]) / 2.0;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }

                // Delta 4: minimum z variable of any T-blossom.
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != SENTINEL
                        && self.blossomparent[b] == SENTINEL
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }

                if deltatype == -1 {
                    // No further improvement possible; max-cardinality optimum
                    // reached.  Do a final delta update to make the optimum
                    // verifiable.
                    debug_assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min)
                        .max(0.0);
                }

                // Update dual variables according to delta.
                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dualvar[v] -= delta, // S-vertex
                        2 => self.dualvar[v] += delta, // T-vertex
                        l => panic!("unexpected vertex label {l}"),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != SENTINEL && self.blossomparent[b] == SENTINEL {
                        match self.label[b] {
                            0 => {}
                            1 => self.dualvar[b] += delta, // top-level S-blossom
                            2 => self.dualvar[b] -= delta, // top-level T-blossom
                            l => panic!("unexpected blossom label {l}"),
                        }
                    }
                }

                // Take action at the point where the minimum delta occurred.
                match deltatype {
                    // No further improvement possible; optimum reached.
                    1 => break,
                    // Use the least-slack edge to continue the search.
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    // Expand the least-z blossom.
                    4 => self.expand_blossom(deltablossom, false),
                    t => panic!("unexpected delta type {t}"),
                }
            }

            // Stop when no more augmenting paths can be found.
            if !augmented {
                break;
            }

            // End of a stage; expand all S-blossoms which have zero dual.
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == SENTINEL
                    && self.blossombase[b] != SENTINEL
                    && self.label[b] == 1
                    && self.dualvar[b].abs() <= self.eps
                {
                    self.expand_blossom(b, true);
                }
            }
        }

        // Verify that we reached an optimum solution.
        self.verify_optimum();

        // Transform mate[] such that mate[v] is the vertex to which v is
        // paired.
        for v in 0..self.nvertex {
            if self.mate[v] != SENTINEL {
                self.mate[v] = self.endpoint[self.mate[v]];
            }
        }
        for v in 0..self.nvertex {
            debug_assert!(self.mate[v] == SENTINEL || self.mate[self.mate[v]] == v);
        }
        self.mate
    }
}

/// Index into `v` with Python-style wrap-around for negative indices.
#[inline]
fn wrap_index(v: &[usize], index: i64) -> usize {
    if index >= 0 {
        v[index as usize]
    } else {
        v[(v.len() as i64 + index) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mates(edges: &[(usize, usize, i32)], maxcard: bool) -> Vec<Option<usize>> {
        let edges: Vec<Edge> = edges.iter().map(|&(i, j, w)| (i, j, w as f64)).collect();
        max_weight_matching(&edges, maxcard)
    }

    fn expect(raw: &[i64]) -> Vec<Option<usize>> {
        raw.iter()
            .map(|&m| if m < 0 { None } else { Some(m as usize) })
            .collect()
    }

    #[test]
    fn no_edges() {
        assert_eq!(max_weight_matching(&[], false), vec![]);
    }

    #[test]
    fn single_edge() {
        assert_eq!(mates(&[(0, 1, 1)], false), expect(&[1, 0]));
    }

    #[test]
    fn two_edges_prefers_heavier() {
        assert_eq!(mates(&[(1, 2, 10), (2, 3, 11)], false), expect(&[-1, -1, 3, 2]));
    }

    #[test]
    fn three_edges_not_max_cardinality() {
        assert_eq!(
            mates(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)], false),
            expect(&[-1, -1, 3, 2, -1])
        );
    }

    #[test]
    fn three_edges_max_cardinality() {
        assert_eq!(
            mates(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)], true),
            expect(&[-1, 2, 1, 4, 3])
        );
    }

    #[test]
    fn negative_weights() {
        let edges = [(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(mates(&edges, false), expect(&[-1, 2, 1, -1, -1]));
        assert_eq!(mates(&edges, true), expect(&[-1, 3, 4, 1, 2]));
    }

    #[test]
    fn s_blossom_augmentation() {
        assert_eq!(
            mates(&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)], false),
            expect(&[-1, 2, 1, 4, 3])
        );
        assert_eq!(
            mates(
                &[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)],
                false
            ),
            expect(&[-1, 6, 3, 2, 5, 4, 1])
        );
    }

    #[test]
    fn s_to_t_relabel_augmentation() {
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)],
                false
            ),
            expect(&[-1, 6, 3, 2, 5, 4, 1])
        );
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (1, 6, 4)],
                false
            ),
            expect(&[-1, 6, 3, 2, 5, 4, 1])
        );
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (3, 6, 4)],
                false
            ),
            expect(&[-1, 2, 1, 6, 5, 4, 3])
        );
    }

    #[test]
    fn nested_s_blossom_augmentation() {
        assert_eq!(
            mates(
                &[(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)],
                false
            ),
            expect(&[-1, 3, 4, 1, 2, 6, 5])
        );
    }

    #[test]
    fn s_blossom_relabel_into_nested() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 10),
                    (1, 7, 10),
                    (2, 3, 12),
                    (3, 4, 20),
                    (3, 5, 20),
                    (4, 5, 25),
                    (5, 6, 10),
                    (6, 7, 10),
                    (7, 8, 8)
                ],
                false
            ),
            expect(&[-1, 2, 1, 4, 3, 6, 5, 8, 7])
        );
    }

    #[test]
    fn nested_s_blossom_expand_recursively() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 8),
                    (1, 3, 8),
                    (2, 3, 10),
                    (2, 4, 12),
                    (3, 5, 12),
                    (4, 5, 14),
                    (4, 6, 12),
                    (5, 7, 12),
                    (6, 7, 14),
                    (7, 8, 12)
                ],
                false
            ),
            expect(&[-1, 2, 1, 5, 6, 3, 4, 8, 7])
        );
    }

    #[test]
    fn s_blossom_relabel_as_t_then_expand() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 23),
                    (1, 5, 22),
                    (1, 6, 15),
                    (2, 3, 25),
                    (3, 4, 22),
                    (4, 5, 25),
                    (4, 8, 14),
                    (5, 7, 13)
                ],
                false
            ),
            expect(&[-1, 6, 3, 2, 8, 7, 1, 5, 4])
        );
    }

    #[test]
    fn nested_s_blossom_relabel_as_t_then_expand() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 19),
                    (1, 3, 20),
                    (1, 8, 8),
                    (2, 3, 25),
                    (2, 4, 18),
                    (3, 5, 18),
                    (4, 5, 13),
                    (4, 7, 7),
                    (5, 6, 7)
                ],
                false
            ),
            expect(&[-1, 8, 3, 2, 7, 6, 5, 4, 1])
        );
    }

    #[test]
    fn t_blossom_relabel_multiple_ways() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 35),
                    (5, 7, 26),
                    (9, 10, 5)
                ],
                false
            ),
            expect(&[-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9])
        );
    }

    #[test]
    fn t_blossom_relabel_multiple_ways_variant() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 26),
                    (5, 7, 40),
                    (9, 10, 5)
                ],
                false
            ),
            expect(&[-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9])
        );
    }

    #[test]
    fn t_blossom_expand_creates_least_slack_edge() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 9, 35),
                    (4, 8, 28),
                    (5, 7, 26),
                    (9, 10, 5)
                ],
                false
            ),
            expect(&[-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9])
        );
    }

    #[test]
    fn nested_t_blossom_expand_onto_augmenting_path() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 45),
                    (1, 7, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 95),
                    (4, 6, 94),
                    (5, 6, 94),
                    (6, 7, 50),
                    (1, 8, 30),
                    (3, 11, 35),
                    (5, 9, 36),
                    (7, 10, 26),
                    (11, 12, 5)
                ],
                false
            ),
            expect(&[-1, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11])
        );
    }

    #[test]
    fn nested_s_blossom_relabel_expand_recursively() {
        assert_eq!(
            mates(
                &[
                    (1, 2, 40),
                    (1, 3, 40),
                    (2, 3, 60),
                    (2, 4, 55),
                    (3, 5, 55),
                    (4, 5, 50),
                    (1, 8, 15),
                    (5, 7, 30),
                    (7, 6, 10),
                    (8, 10, 10),
                    (4, 9, 30)
                ],
                false
            ),
            expect(&[-1, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8])
        );
    }

    #[test]
    fn fractional_weights() {
        // The heavier pairing must win even when weights are non-integer and
        // differ by less than one: the middle edge (1.5) beats the two outer
        // edges combined (0.7 + 0.7), but maximum cardinality flips that.
        let edges = [(0, 1, 0.7), (1, 2, 1.5), (2, 3, 0.7)];
        assert_eq!(max_weight_matching(&edges, false), expect(&[-1, 2, 1, -1]));
        assert_eq!(max_weight_matching(&edges, true), expect(&[1, 0, 3, 2]));
    }

    #[test]
    fn perfect_matching_square() {
        let edges = [
            (0, 1, 1.0),
            (2, 3, 1.0),
            (0, 2, 5.0),
            (1, 3, 5.0),
            (0, 3, 2.0),
            (1, 2, 2.0),
        ];
        assert_eq!(
            min_weight_perfect_matching(4, &edges).unwrap(),
            vec![(0, 1), (2, 3)]
        );
    }

    #[test]
    fn perfect_matching_requires_full_cover() {
        // Path 0-1-2 plus an isolated vertex 3: no perfect matching exists.
        let edges = [(0, 1, 1.0), (1, 2, 1.0)];
        let err = min_weight_perfect_matching(4, &edges).unwrap_err();
        assert_eq!(err.unmatched, 2);
    }

    #[test]
    fn perfect_matching_empty_graph() {
        assert_eq!(min_weight_perfect_matching(0, &[]).unwrap(), vec![]);
    }

    #[test]
    fn perfect_matching_odd_vertex_count() {
        let edges = [(0, 1, 1.0), (1, 2, 1.0)];
        assert!(min_weight_perfect_matching(3, &edges).is_err());
    }

    #[test]
    fn perfect_matching_prefers_cheap_pairs_over_greedy() {
        // Greedy would take the cheap (1,2) edge and strand 0 and 3 on the
        // expensive edge; the optimum pairs the two middle-cost edges.
        let edges = [(0, 1, 2.0), (1, 2, 1.0), (2, 3, 2.0), (0, 3, 10.0)];
        assert_eq!(
            min_weight_perfect_matching(4, &edges).unwrap(),
            vec![(0, 1), (2, 3)]
        );
    }

    #[test]
    fn deterministic_on_ties() {
        // Two equal-weight perfect matchings; identical input must give an
        // identical result every time.
        let edges = [(0, 1, 1.0), (2, 3, 1.0), (0, 2, 1.0), (1, 3, 1.0)];
        let first = min_weight_perfect_matching(4, &edges).unwrap();
        for _ in 0..5 {
            assert_eq!(min_weight_perfect_matching(4, &edges).unwrap(), first);
        }
    }

    #[test]
    fn zero_weight_edges_allowed() {
        let edges = [(0, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0)];
        let pairs = min_weight_perfect_matching(4, &edges).unwrap();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
    }
}
