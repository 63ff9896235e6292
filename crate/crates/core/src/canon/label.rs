//! Individualisation-refinement canonical labelling.
//!
//! The canonical form of a vertex-coloured graph is the least leaf of the
//! search tree under the order (refinement trace, permuted edge list). Leaves
//! are pruned by trace comparison against the current best leaf, and by
//! automorphisms discovered when two leaves produce the same graph.

use std::collections::VecDeque;

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    // splitmix64 finaliser over the running hash
    let mut z = h ^ x.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Ordered partition of the vertex set.
#[derive(Clone)]
struct Partition {
    /// position -> vertex
    lab: Vec<u32>,
    /// vertex -> position
    pos: Vec<u32>,
    /// vertex -> start position of its cell
    cell: Vec<u32>,
    /// cell start -> cell length (meaningful only at cell starts)
    len: Vec<u32>,
    cells: usize,
}

impl Partition {
    /// Cells are the colour classes, ordered by colour value.
    fn from_colours(colours: &[u32]) -> (Self, Vec<u32>) {
        let n = colours.len();
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| colours[v as usize]);
        let mut pos = vec![0; n];
        let mut cell = vec![0; n];
        let mut len = vec![0; n];
        let mut starts = Vec::new();
        let mut i = 0;
        while i < n {
            let c = colours[lab[i] as usize];
            let mut j = i;
            while j < n && colours[lab[j] as usize] == c {
                pos[lab[j] as usize] = j as u32;
                cell[lab[j] as usize] = i as u32;
                j += 1;
            }
            len[i] = (j - i) as u32;
            starts.push(i as u32);
            i = j;
        }
        let cells = starts.len();
        (Partition { lab, pos, cell, len, cells }, starts)
    }

    #[inline]
    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn first_nontrivial_cell(&self) -> Option<usize> {
        let mut i = 0;
        while i < self.lab.len() {
            if self.len[i] > 1 {
                return Some(i);
            }
            i += self.len[i] as usize;
        }
        None
    }

    /// Splits `v` off the front of its cell; returns the new singleton's start.
    fn individualise(&mut self, v: u32) -> u32 {
        let c = self.cell[v as usize];
        let l = self.len[c as usize];
        debug_assert!(l > 1);
        let p = self.pos[v as usize];
        let u = self.lab[c as usize];
        self.lab.swap(c as usize, p as usize);
        self.pos[u as usize] = p;
        self.pos[v as usize] = c;
        self.len[c as usize] = 1;
        self.len[c as usize + 1] = l - 1;
        for i in c + 1..c + l {
            self.cell[self.lab[i as usize] as usize] = c + 1;
        }
        self.cells += 1;
        c
    }
}

/// Scratch buffers shared by all refinements of one search.
struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    touched_cells: Vec<u32>,
    cell_marked: Vec<bool>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
}

impl Refiner {
    fn new(n: usize) -> Self {
        Refiner {
            count: vec![0; n],
            touched: Vec::new(),
            touched_cells: Vec::new(),
            cell_marked: vec![false; n],
            in_queue: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    /// Refines `p` to the coarsest equitable partition below it, starting
    /// from the given splitter cells. Returns a hash of the refinement trace,
    /// which depends only on positions and counts and is therefore invariant
    /// under relabelling.
    fn refine(&mut self, adj: &[Vec<u32>], p: &mut Partition, splitters: &[u32], seed: u64) -> u64 {
        let mut trace = seed;
        for &s in splitters {
            if !self.in_queue[s as usize] {
                self.in_queue[s as usize] = true;
                self.queue.push_back(s);
            }
        }
        while let Some(w) = self.queue.pop_front() {
            self.in_queue[w as usize] = false;
            if p.is_discrete() {
                continue;
            }
            let wlen = p.len[w as usize];
            trace = mix(trace, ((w as u64) << 32) | wlen as u64);
            for i in w..w + wlen {
                let v = p.lab[i as usize];
                for &x in &adj[v as usize] {
                    if self.count[x as usize] == 0 {
                        self.touched.push(x);
                    }
                    self.count[x as usize] += 1;
                }
            }
            for &x in &self.touched {
                let c = p.cell[x as usize];
                if !self.cell_marked[c as usize] {
                    self.cell_marked[c as usize] = true;
                    self.touched_cells.push(c);
                }
            }
            self.touched_cells.sort_unstable();
            for ti in 0..self.touched_cells.len() {
                let c = self.touched_cells[ti] as usize;
                self.cell_marked[c] = false;
                let l = p.len[c] as usize;
                if l == 1 {
                    trace = mix(trace, ((c as u64) << 32) | self.count[p.lab[c] as usize] as u64);
                    continue;
                }
                let count = &self.count;
                p.lab[c..c + l].sort_unstable_by_key(|&v| count[v as usize]);
                // fragment boundaries
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut start = c;
                for i in c + 1..=c + l {
                    if i == c + l || count[p.lab[i] as usize] != count[p.lab[start] as usize] {
                        frags.push((start, i - start));
                        start = i;
                    }
                }
                trace = mix(trace, c as u64);
                for &(s, fl) in &frags {
                    trace = mix(trace, ((count[p.lab[s] as usize] as u64) << 32) | fl as u64);
                }
                for i in c..c + l {
                    p.pos[p.lab[i] as usize] = i as u32;
                }
                if frags.len() == 1 {
                    continue;
                }
                for &(s, fl) in &frags {
                    p.len[s] = fl as u32;
                    for i in s..s + fl {
                        p.cell[p.lab[i] as usize] = s as u32;
                    }
                }
                p.cells += frags.len() - 1;
                if self.in_queue[c] {
                    for &(s, _) in &frags[1..] {
                        self.in_queue[s] = true;
                        self.queue.push_back(s as u32);
                    }
                } else {
                    // skip the first largest fragment
                    let mut big = 0;
                    for (i, f) in frags.iter().enumerate() {
                        if f.1 > frags[big].1 {
                            big = i;
                        }
                    }
                    for (i, &(s, _)) in frags.iter().enumerate() {
                        if i != big {
                            self.in_queue[s] = true;
                            self.queue.push_back(s as u32);
                        }
                    }
                }
            }
            for &x in &self.touched {
                self.count[x as usize] = 0;
            }
            self.touched.clear();
            self.touched_cells.clear();
        }
        trace
    }
}

struct Leaf {
    traces: Vec<u64>,
    cert: Vec<u64>,
    lab: Vec<u32>,
    path: Vec<u32>,
}

enum Step {
    Continue,
    /// Abandon the current subtree and resume at the node of this depth.
    JumpTo(usize),
}

struct Search<'a> {
    adj: &'a [Vec<u32>],
    refiner: Refiner,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<u32>>,
}

fn certificate(adj: &[Vec<u32>], p: &Partition) -> Vec<u64> {
    let mut cert = Vec::new();
    for (v, list) in adj.iter().enumerate() {
        let a = p.pos[v];
        for &w in list {
            let b = p.pos[w as usize];
            if a < b {
                cert.push(((a as u64) << 32) | b as u64);
            }
        }
    }
    cert.sort_unstable();
    cert
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

impl<'a> Search<'a> {
    /// Is `traces` (a node's trace prefix) already worse than the best leaf?
    fn worse_than_best(&self, traces: &[u64]) -> bool {
        match &self.best {
            None => false,
            Some(best) => {
                for (i, t) in traces.iter().enumerate() {
                    match best.traces.get(i) {
                        None => return true,
                        Some(b) if t > b => return true,
                        Some(b) if t < b => return false,
                        _ => {}
                    }
                }
                false
            }
        }
    }

    fn record_automorphism(&mut self, from: &[u32], to: &[u32]) {
        let mut gamma = vec![0u32; from.len()];
        for (a, b) in from.iter().zip(to) {
            gamma[*a as usize] = *b;
        }
        if gamma.iter().enumerate().any(|(i, &g)| i as u32 != g) {
            self.generators.push(gamma);
        }
    }

    fn leaf(&mut self, p: &Partition, path: &[u32], traces: &[u64]) -> Step {
        let cert = certificate(self.adj, p);
        let Some(first) = &self.first else {
            let leaf = Leaf { traces: traces.to_vec(), cert, lab: p.lab.clone(), path: path.to_vec() };
            self.first = Some(Leaf {
                traces: leaf.traces.clone(),
                cert: leaf.cert.clone(),
                lab: leaf.lab.clone(),
                path: leaf.path.clone(),
            });
            self.best = Some(leaf);
            return Step::Continue;
        };
        if first.traces == traces && first.cert == cert {
            let (flab, fpath) = (first.lab.clone(), first.path.clone());
            self.record_automorphism(&flab, &p.lab);
            return Step::JumpTo(common_prefix(&fpath, path));
        }
        let best = self.best.as_ref().expect("best is set with first");
        match (traces, &cert[..]).cmp(&(&best.traces[..], &best.cert[..])) {
            std::cmp::Ordering::Equal => {
                let (blab, bpath) = (best.lab.clone(), best.path.clone());
                self.record_automorphism(&blab, &p.lab);
                Step::JumpTo(common_prefix(&bpath, path))
            }
            std::cmp::Ordering::Less => {
                self.best = Some(Leaf { traces: traces.to_vec(), cert, lab: p.lab.clone(), path: path.to_vec() });
                Step::Continue
            }
            std::cmp::Ordering::Greater => Step::Continue,
        }
    }

    /// Orbit representatives of the group generated by the automorphisms
    /// found so far that fix `path` pointwise.
    fn orbits(&self, n: usize, path: &[u32]) -> Vec<u32> {
        let mut parent: Vec<u32> = (0..n as u32).collect();
        for g in &self.generators {
            if path.iter().all(|&v| g[v as usize] == v) {
                for (i, &gi) in g.iter().enumerate() {
                    let a = find(&mut parent, i as u32);
                    let b = find(&mut parent, gi);
                    if a != b {
                        parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        (0..n as u32).map(|v| find(&mut parent, v)).collect()
    }

    fn descend(&mut self, p: &Partition, path: &mut Vec<u32>, traces: &mut Vec<u64>) -> Step {
        if self.worse_than_best(traces) {
            return Step::Continue;
        }
        if p.is_discrete() {
            return self.leaf(p, path, traces);
        }
        let depth = path.len();
        let target = p.first_nontrivial_cell().expect("partition is not discrete");
        let mut cell: Vec<u32> = p.lab[target..target + p.len[target] as usize].to_vec();
        cell.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbit_cache: Option<(usize, Vec<u32>)> = None;
        for &v in &cell {
            if !explored.is_empty() && !self.generators.is_empty() {
                let stale = orbit_cache.as_ref().map_or(true, |(k, _)| *k != self.generators.len());
                if stale {
                    orbit_cache = Some((self.generators.len(), self.orbits(p.lab.len(), path)));
                }
                let orb = &orbit_cache.as_ref().unwrap().1;
                if explored.iter().any(|&w| orb[w as usize] == orb[v as usize]) {
                    continue;
                }
            }
            let mut child = p.clone();
            let s = child.individualise(v);
            let t = self.refiner.refine(self.adj, &mut child, &[s], mix(depth as u64, s as u64));
            path.push(v);
            traces.push(t);
            let step = self.descend(&child, path, traces);
            path.pop();
            traces.pop();
            explored.push(v);
            if let Step::JumpTo(level) = step {
                if level < depth {
                    return step;
                }
            }
        }
        Step::Continue
    }
}

/// Canonical labelling of a vertex-coloured graph.
///
/// Returns `order` with `order[i]` the vertex placed at canonical position
/// `i`, and the canonical edge list over positions (sorted, `a < b`).
/// Vertices appear in nondecreasing colour order.
pub(crate) fn canonical_labelling(adj: &[Vec<u32>], colours: &[u32]) -> (Vec<u32>, Vec<(u32, u32)>) {
    let n = adj.len();
    assert_eq!(colours.len(), n);
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let (mut part, starts) = Partition::from_colours(colours);
    let mut refiner = Refiner::new(n);
    let t0 = refiner.refine(adj, &mut part, &starts, 0x5eed);
    let mut search = Search { adj, refiner, first: None, best: None, generators: Vec::new() };
    let mut path = Vec::new();
    let mut traces = vec![t0];
    search.descend(&part, &mut path, &mut traces);
    let best = search.best.expect("search visits at least one leaf");
    let edges = best.cert.iter().map(|&c| ((c >> 32) as u32, c as u32)).collect();
    (best.lab, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj_of(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    #[test]
    fn equitable_refinement_splits_by_degree() {
        // star K_{1,3}: centre separates from leaves
        let adj = adj_of(4, &[(0, 1), (0, 2), (0, 3)]);
        let (mut p, starts) = Partition::from_colours(&[0; 4]);
        Refiner::new(4).refine(&adj, &mut p, &starts, 0);
        assert_eq!(p.cells, 2);
    }

    #[test]
    fn regular_graph_needs_search() {
        // C6 versus two triangles: refinement alone cannot tell them apart
        let c6 = adj_of(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let tt = adj_of(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let (mut p, s) = Partition::from_colours(&[0; 6]);
        Refiner::new(6).refine(&c6, &mut p, &s, 0);
        assert_eq!(p.cells, 1);
        let a = canonical_labelling(&c6, &[0; 6]).1;
        let b = canonical_labelling(&tt, &[0; 6]).1;
        assert_ne!(a, b);
    }

    #[test]
    fn large_symmetric_star_is_fast() {
        let n = 400;
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (0, v)).collect();
        let adj = adj_of(n, &edges);
        let (order, canon) = canonical_labelling(&adj, &vec![0; n]);
        assert_eq!(order.len(), n);
        assert_eq!(canon.len(), n - 1);
    }
}
