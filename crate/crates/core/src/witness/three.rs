//! The radius-3 swap between two far-apart good edges with isomorphic
//! `H_uv` structures.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{certified, CertificateKind, FinderKind, FinderOptions, FinderResult, FinderStats};
use crate::canon::{canonical_code_edge_rooted, canonical_code_rooted, CanonError, CanonicalCode, EdgeRootedCodes, EdgeRootedGraph};
use crate::graph::{BallScratch, Graph, GraphError};

/// Degree window of a good edge: `|d(z) - (n-1)p| < width`, with
/// `width = 10 sqrt(np log np)`, or 0 when `np log np <= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodEdgeWindow {
    pub centre: f64,
    pub width: f64,
}

impl GoodEdgeWindow {
    pub fn new(n: usize, p: f64) -> Self {
        let np = n as f64 * p;
        let s = np * np.ln();
        let width = if s > 0.0 { 10.0 * s.sqrt() } else { 0.0 };
        GoodEdgeWindow { centre: (n as f64 - 1.0) * p, width }
    }

    pub fn contains(&self, degree: usize) -> bool {
        (degree as f64 - self.centre).abs() < self.width
    }
}

/// Epoch-marked BFS state reused across edges.
struct Scan {
    mark: Vec<u32>,
    epoch: u32,
    dist: Vec<u32>,
    parent: Vec<usize>,
    queue: Vec<usize>,
}

impl Scan {
    fn new(n: usize) -> Self {
        Scan { mark: vec![0; n], epoch: 0, dist: vec![0; n], parent: vec![0; n], queue: Vec::new() }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.queue.clear();
    }

    fn seen(&self, x: usize) -> bool {
        self.mark[x] == self.epoch
    }

    fn visit(&mut self, x: usize, d: u32, parent: usize) {
        self.mark[x] = self.epoch;
        self.dist[x] = d;
        self.parent[x] = parent;
        self.queue.push(x);
    }

    /// Degrees of everything within 2 of `{u, v}` lie in the window.
    fn degrees_ok(&mut self, g: &Graph, u: usize, v: usize, w: &GoodEdgeWindow) -> bool {
        self.reset();
        self.visit(u, 0, v);
        self.visit(v, 0, u);
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            if !w.contains(g.degree(x)) {
                return false;
            }
            if self.dist[x] == 2 {
                continue;
            }
            for &y in g.neighbours(x) {
                if !self.seen(y) {
                    self.visit(y, self.dist[x] + 1, x);
                }
            }
        }
        true
    }

    /// `G[Γ≤radius(u) ∪ Γ≤radius(v)]` is a tree, for an edge `uv`. Stops at
    /// the first edge closing a cycle.
    fn joint_ball_is_tree(&mut self, g: &Graph, u: usize, v: usize, radius: u32) -> bool {
        self.reset();
        self.visit(u, 0, v);
        self.visit(v, 0, u);
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            for &y in g.neighbours(x) {
                if y == self.parent[x] {
                    continue;
                }
                if self.seen(y) {
                    return false;
                }
                if self.dist[x] < radius {
                    self.visit(y, self.dist[x] + 1, x);
                }
            }
        }
        true
    }

    /// True iff no vertex of `targets` is within `limit` of `sources`.
    fn all_farther(&mut self, g: &Graph, sources: &[usize], targets: &[usize], limit: u32) -> bool {
        self.reset();
        for &s in sources {
            if !self.seen(s) {
                self.visit(s, 0, s);
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            if targets.contains(&x) {
                return false;
            }
            if self.dist[x] == limit {
                continue;
            }
            for &y in g.neighbours(x) {
                if !self.seen(y) {
                    self.visit(y, self.dist[x] + 1, x);
                }
            }
        }
        true
    }
}

/// `uv` is good when `G[Γ≤5(u) ∪ Γ≤5(v)]` is a tree and every vertex within
/// distance 2 of `u` or `v` has degree inside the window for `p`.
pub fn good_edge(g: &Graph, u: usize, v: usize, p: f64) -> Result<bool, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if !g.has_edge(u, v) {
        return Err(GraphError::MissingEdge(u, v));
    }
    let w = GoodEdgeWindow::new(g.n(), p);
    let mut scan = Scan::new(g.n());
    Ok(scan.degrees_ok(g, u, v, &w) && scan.joint_ball_is_tree(g, u, v, 5))
}

/// `H_uv`: the subgraph induced on `Γ≤2(u) ∪ Γ≤2(v)` with `uv` distinguished.
pub fn h_structure(g: &Graph, u: usize, v: usize) -> Result<EdgeRootedGraph, CanonError> {
    let verts = g.within(&[u, v], 2);
    let h = g.induced(&verts);
    // `within` lists the sources first
    EdgeRootedGraph::new(&h, 0, 1)
}

/// Number of vertices whose 3-ball code equals that of `v`.
fn ball3_class_size(g: &Graph, v: usize, scratch: &mut BallScratch) -> usize {
    let target_ball = scratch.extract(g, v, 3).expect("vertex in range");
    let (deg, size) = (g.degree(v), target_ball.len());
    let target = canonical_code_rooted(&target_ball);
    (0..g.n())
        .filter(|&w| {
            g.degree(w) == deg && {
                let b = scratch.extract(g, w, 3).expect("vertex in range");
                b.len() == size && canonical_code_rooted(&b) == target
            }
        })
        .count()
}

/// Enumerates good edges in lexicographic order and buckets them by the
/// class of `H_uv`, keeping up to `bucket_size` representatives per class.
/// A new edge `xy` pairs with a representative `uv` when `x` and `y` are at
/// distance at least 7 from both `u` and `v`. With `u` matched to `x` by the
/// ordered codes, `G' = G - {uv, xy} + {uy, vx}`. Candidates are dropped if
/// a new edge lies on a cycle of length at most 7 in `G'`, if the 3-ball of
/// `u` or `v` is not unique, or if the swap does not verify.
pub fn find_r3_witness(g: &Graph, opts: &FinderOptions) -> FinderResult {
    let p = opts.p_or_estimate(g);
    let window = GoodEdgeWindow::new(g.n(), p);
    let edges = g.edge_vec();
    let good: Vec<bool> = edges
        .par_iter()
        .map_init(
            || Scan::new(g.n()),
            |scan, &(u, v)| scan.degrees_ok(g, u, v, &window) && scan.joint_ball_is_tree(g, u, v, 5),
        )
        .collect();
    let good_edges: Vec<(usize, usize)> =
        edges.iter().zip(&good).filter(|(_, &ok)| ok).map(|(&e, _)| e).collect();
    let mut stats = FinderStats { good_edges: Some(good_edges.len()), ..FinderStats::default() };

    let mut scan = Scan::new(g.n());
    let mut scratch = BallScratch::new(g.n());
    let mut buckets: HashMap<CanonicalCode, Vec<(usize, usize, EdgeRootedCodes)>> = HashMap::new();
    for &(a, b) in &good_edges {
        let codes = canonical_code_edge_rooted(&h_structure(g, a, b).expect("good edges are edges"));
        let bucket = buckets.entry(codes.unordered.clone()).or_default();
        for (u, v, uv_codes) in bucket.iter() {
            let (u, v) = (*u, *v);
            stats.candidates += 1;
            if !scan.all_farther(g, &[u, v], &[a, b], 6) {
                continue;
            }
            let (x, y) = if codes.forward == uv_codes.forward { (a, b) } else { (b, a) };
            let Ok(g_prime) = g.with_edits(&[(u, v), (x, y)], &[(u, y), (v, x)]) else {
                continue;
            };
            let short_cycle = [(u, y), (v, x)].iter().any(|&(s, t)| {
                let without = g_prime.with_edits(&[(s, t)], &[]).expect("edge was added");
                !scan.all_farther(&without, &[s], &[t], 6)
            });
            if short_cycle
                || ball3_class_size(g, u, &mut scratch) != 1
                || ball3_class_size(g, v, &mut scratch) != 1
            {
                stats.rejected += 1;
                continue;
            }
            match certified(
                g,
                FinderKind::R3,
                3,
                vec![(u, v), (x, y)],
                vec![(u, y), (v, x)],
                vec![u, v, x, y],
                CertificateKind::Ball3ClassEdge,
            ) {
                Some(w) => return FinderResult { witness: Some(w), stats },
                None => stats.rejected += 1,
            }
        }
        if bucket.len() < opts.bucket_size.max(1) {
            bucket.push((a, b, codes));
        }
    }
    FinderResult { witness: None, stats }
}
