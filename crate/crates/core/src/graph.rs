//! Simple undirected graphs, seeded `G(n, p)` sampling and rooted balls.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use thiserror::Error;

/// Below this edge probability the sampler skips over non-edges with
/// geometric jumps instead of testing every pair.
const SPARSE_SAMPLING_CUTOFF: f64 = 0.1;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} is not present")]
    MissingEdge(usize, usize),
    #[error("radius {requested} exceeds ball radius {radius}")]
    RadiusTooLarge { requested: usize, radius: usize },
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("malformed edge list at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An immutable simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are kept sorted, so membership tests are binary searches.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { adj, m })
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    /// Path on `n` vertices `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    /// Disjoint union, with `other`'s vertices shifted past `self`'s.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + shift, v + shift)));
        Graph::from_edges(shift + other.n(), edges).expect("union of simple graphs is simple")
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        Graph::from_edges(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
            .expect("relabelling by a permutation keeps the graph simple")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_vec(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Returns a copy with `removed` deleted and then `added` inserted.
    pub fn with_edits(
        &self,
        removed: &[(usize, usize)],
        added: &[(usize, usize)],
    ) -> Result<Graph, GraphError> {
        let mut adj = self.adj.clone();
        let mut m = self.m;
        for &(u, v) in removed {
            self.check_vertex(u)?;
            self.check_vertex(v)?;
            let pu = adj[u].binary_search(&v).map_err(|_| GraphError::MissingEdge(u, v))?;
            adj[u].remove(pu);
            let pv = adj[v].binary_search(&u).expect("adjacency is symmetric");
            adj[v].remove(pv);
            m -= 1;
        }
        for &(u, v) in added {
            self.check_vertex(u)?;
            self.check_vertex(v)?;
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            match adj[u].binary_search(&v) {
                Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
                Err(pos) => adj[u].insert(pos, v),
            }
            let pv = adj[v].binary_search(&u).unwrap_err();
            adj[v].insert(pv, u);
            m += 1;
        }
        Ok(Graph { adj, m })
    }

    /// Breadth-first distances from `source`, stopping at `limit` hops.
    /// Unreached vertices get `None`.
    pub fn distances_from(&self, source: usize, limit: usize) -> Vec<Option<usize>> {
        self.distances_from_set(&[source], limit)
    }

    /// Multi-source breadth-first distances, stopping at `limit` hops.
    pub fn distances_from_set(&self, sources: &[usize], limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            if d == limit {
                continue;
            }
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Vertices within `limit` hops of any vertex in `sources`, in BFS order.
    pub fn within(&self, sources: &[usize], limit: usize) -> Vec<usize> {
        BallScratch::new(self.n()).collect(self, sources, limit).0
    }

    /// Induced subgraph on `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut m = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = index.get(w) {
                    adj[i].push(j);
                    if i < j {
                        m += 1;
                    }
                }
            }
            adj[i].sort_unstable();
        }
        Graph { adj, m }
    }

    /// Writes the edge-list text format: `n m`, then one `u v` line per edge
    /// with `u < v`, lexicographically sorted.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n(), self.m)?;
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", u, v)?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    /// Parses the edge-list text format. Blank trailing lines are accepted.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph, GraphError> {
        let mut lines = input.lines().enumerate();
        let parse_err = |line: usize, msg: &str| GraphError::Parse { line: line + 1, msg: msg.into() };
        let (hline, header) = loop {
            match lines.next() {
                Some((i, l)) => {
                    let l = l?;
                    if !l.trim().is_empty() {
                        break (i, l);
                    }
                }
                None => return Err(parse_err(0, "missing header")),
            }
        };
        let (n, m) = parse_pair(&header).ok_or_else(|| parse_err(hline, "expected `n m`"))?;
        let mut edges = Vec::with_capacity(m);
        for (i, l) in lines {
            let l = l?;
            if l.trim().is_empty() {
                continue;
            }
            let (u, v) = parse_pair(&l).ok_or_else(|| parse_err(i, "expected `u v`"))?;
            if u >= v {
                return Err(parse_err(i, "edges must be written with u < v"));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(parse_err(hline, &format!("header promises {} edges, found {}", m, edges.len())));
        }
        Graph::from_edges(n, edges)
    }

    pub fn from_edge_list_str(s: &str) -> Result<Graph, GraphError> {
        Graph::read_edge_list(s.as_bytes())
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edge_vec())
    }
}

/// Parameters of an Erdős–Rényi sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GnpParams {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self, GraphError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::BadProbability(p));
        }
        Ok(GnpParams { n, p, seed })
    }
}

/// Samples `G(n, p)` from a ChaCha stream keyed by the seed.
///
/// Sparse probabilities walk the lexicographic pair sequence with geometric
/// gaps; dense ones flip a coin per pair.
pub fn sample_gnp(params: GnpParams) -> Graph {
    let GnpParams { n, p, seed } = params;
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    if n < 2 || p == 0.0 {
        return Graph::empty(n);
    }
    if p < SPARSE_SAMPLING_CUTOFF {
        let gap = Geometric::new(p).expect("p in (0, 1)");
        // (u, v) walks the pairs u < v row by row, starting just before (0, 1).
        let (mut u, mut v) = (0usize, 0usize);
        let mut step = gap.sample(&mut rng) + 1;
        loop {
            let mut col = v as u64 + step;
            while col >= n as u64 {
                col -= n as u64;
                u += 1;
                if u + 1 >= n {
                    return Graph::from_edges(n, edges).expect("sampled pairs are distinct");
                }
                col += (u + 1) as u64;
            }
            v = col as usize;
            edges.push((u, v));
            step = gap.sample(&mut rng) + 1;
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("sampled pairs are distinct")
}

/// Connected components as sorted vertex lists, ordered by smallest vertex.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for &y in g.neighbours(x) {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    members.push(y);
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Largest component size (0 for the empty graph).
pub fn max_component_size(g: &Graph) -> usize {
    components(g).iter().map(Vec::len).max().unwrap_or(0)
}

/// The ball `N_r(v)`: the subgraph induced on vertices within distance `r`
/// of the centre, relabelled `0..k` in BFS order with the centre at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedBall {
    centre: usize,
    radius: usize,
    /// Local id -> id in the source graph. Dropped by [`RootedBall::anonymised`].
    labels: Option<Vec<usize>>,
    dist: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

impl RootedBall {
    /// Builds a ball from a local edge list whose root is local vertex 0.
    /// Every vertex must lie within `radius` of the root.
    pub fn from_local_edges(
        centre: usize,
        radius: usize,
        k: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::VertexOutOfRange { vertex: 0, n: 0 });
        }
        let g = Graph::from_edges(k, edges.iter().copied())?;
        let dist = g.distances_from(0, radius);
        let mut d = Vec::with_capacity(k);
        for (v, dv) in dist.iter().enumerate() {
            match dv {
                Some(x) => d.push(*x as u32),
                None => {
                    return Err(GraphError::Parse {
                        line: 0,
                        msg: format!("local vertex {v} is farther than {radius} from the root"),
                    })
                }
            }
        }
        let adj = g.adj.iter().map(|l| l.iter().map(|&x| x as u32).collect()).collect();
        Ok(RootedBall { centre, radius, labels: None, dist: d, adj })
    }

    /// Source-graph id of the root.
    #[inline]
    pub fn centre(&self) -> usize {
        self.centre
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of vertices in the ball.
    #[inline]
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Source-graph ids of the local vertices, if still attached.
    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Source ids of the ball's vertex set, sorted. Panics on an anonymised ball.
    pub fn vertex_ids(&self) -> Vec<usize> {
        let mut ids = self.labels.clone().expect("ball has been anonymised");
        ids.sort_unstable();
        ids
    }

    #[inline]
    pub fn distance(&self, local: usize) -> usize {
        self.dist[local] as usize
    }

    #[inline]
    pub fn neighbours(&self, local: usize) -> &[u32] {
        &self.adj[local]
    }

    #[inline]
    pub fn degree(&self, local: usize) -> usize {
        self.adj[local].len()
    }

    pub(crate) fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    /// Local edges `(a, b)`, `a < b`, sorted.
    pub fn local_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adj.iter().enumerate() {
            for &b in list {
                if (b as usize) > a {
                    out.push((a, b as usize));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Local ids at distance exactly `r` from the root, i.e. `Γ_r`.
    pub fn frontier(&self, r: usize) -> Result<Vec<usize>, GraphError> {
        if r > self.radius {
            return Err(GraphError::RadiusTooLarge { requested: r, radius: self.radius });
        }
        Ok((0..self.len()).filter(|&x| self.dist[x] as usize == r).collect())
    }

    /// Drops the source labels, leaving only the root's id.
    pub fn anonymised(mut self) -> Self {
        self.labels = None;
        self
    }

    /// The ball as a plain graph on its local ids.
    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.len(), self.local_edges()).expect("ball is simple")
    }

    /// The ball of radius `r` around local vertex `local`, computed inside
    /// this ball. It agrees with the true ball whenever
    /// `distance(local) + r <= radius`.
    pub fn sub_ball(&self, local: usize, r: usize) -> RootedBall {
        let mut order = vec![local as u32];
        let mut index = vec![u32::MAX; self.len()];
        let mut dist = vec![0u32];
        index[local] = 0;
        let mut head = 0;
        while head < order.len() {
            let x = order[head] as usize;
            let d = dist[head];
            head += 1;
            if d as usize == r {
                continue;
            }
            for &y in &self.adj[x] {
                if index[y as usize] == u32::MAX {
                    index[y as usize] = order.len() as u32;
                    order.push(y);
                    dist.push(d + 1);
                }
            }
        }
        let adj = order
            .iter()
            .map(|&x| {
                let mut l: Vec<u32> = self.adj[x as usize]
                    .iter()
                    .filter_map(|&y| match index[y as usize] {
                        u32::MAX => None,
                        j => Some(j),
                    })
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ids| order.iter().map(|&x| ids[x as usize]).collect::<Vec<_>>());
        let centre = match &labels {
            Some(ids) => ids[0],
            None if local == 0 => self.centre,
            // the source id of a non-root vertex of an anonymised ball is unknown
            None => usize::MAX,
        };
        RootedBall { centre, radius: r, labels, dist, adj }
    }

    /// Breadth-first distances from `local` inside the ball, capped at `limit`.
    pub(crate) fn local_distances(&self, local: usize, limit: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[local] = 0;
        queue.push_back(local);
        while let Some(x) = queue.pop_front() {
            let d = dist[x];
            if d as usize == limit {
                continue;
            }
            for &y in &self.adj[x] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = d + 1;
                    queue.push_back(y as usize);
                }
            }
        }
        dist
    }
}

/// Reusable BFS workspace for extracting many balls from one graph.
pub struct BallScratch {
    mark: Vec<u32>,
    epoch: u32,
}

impl BallScratch {
    pub fn new(n: usize) -> Self {
        BallScratch { mark: vec![u32::MAX; n], epoch: 0 }
    }

    fn next_epoch(&mut self) {
        self.epoch += 1;
        if self.epoch == u32::MAX - 1 {
            self.mark.iter_mut().for_each(|m| *m = u32::MAX);
            self.epoch = 0;
        }
    }

    /// BFS order and distances of everything within `limit` of `sources`.
    fn collect(&mut self, g: &Graph, sources: &[usize], limit: usize) -> (Vec<usize>, Vec<u32>) {
        self.next_epoch();
        let epoch = self.epoch;
        let mut order = Vec::new();
        let mut dist = Vec::new();
        for &s in sources {
            if self.mark[s] != epoch {
                self.mark[s] = epoch;
                order.push(s);
                dist.push(0);
            }
        }
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            let d = dist[head];
            head += 1;
            if d as usize == limit {
                continue;
            }
            for &y in g.neighbours(x) {
                if self.mark[y] != epoch {
                    self.mark[y] = epoch;
                    order.push(y);
                    dist.push(d + 1);
                }
            }
        }
        (order, dist)
    }

    pub fn extract(&mut self, g: &Graph, v: usize, r: usize) -> Result<RootedBall, GraphError> {
        g.check_vertex(v)?;
        let (order, dist) = self.collect(g, &[v], r);
        let mut pos = std::collections::HashMap::with_capacity(order.len());
        for (i, &x) in order.iter().enumerate() {
            pos.insert(x, i as u32);
        }
        let adj = order
            .iter()
            .map(|&x| {
                let mut l: Vec<u32> =
                    g.neighbours(x).iter().filter_map(|y| pos.get(y).copied()).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Ok(RootedBall { centre: v, radius: r, labels: Some(order), dist, adj })
    }
}

/// Extracts `N_r(v)` from `g`.
pub fn extract_ball(g: &Graph, v: usize, r: usize) -> Result<RootedBall, GraphError> {
    BallScratch::new(g.n()).extract(g, v, r)
}

/// `Γ_r(root)` of a ball, as local ids.
pub fn ball_frontier(ball: &RootedBall, r: usize) -> Result<Vec<usize>, GraphError> {
    ball.frontier(r)
}
