//! Independent oracles shared by the integration tests. None of these call
//! into the library's search code; they only use `Graph` as a container.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shotgun::graph::Graph;

pub const INF: usize = usize::MAX;

/// All-pairs shortest paths by Floyd-Warshall.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Component vertex sets by union-find, each sorted, ordered by least vertex.
pub fn uf_components(g: &Graph) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(g.n());
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n() {
        let root = uf.find(v);
        groups.entry(root).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// Sorted component sizes.
pub fn uf_component_sizes(g: &Graph) -> Vec<usize> {
    let mut s: Vec<usize> = uf_components(g).iter().map(|c| c.len()).collect();
    s.sort_unstable();
    s
}

/// Number of components that are paths on exactly `k` vertices, counted as
/// trees (`k - 1` edges) with maximum degree at most 2.
pub fn census_path_components(g: &Graph, k: usize) -> usize {
    uf_components(g)
        .iter()
        .filter(|c| {
            let deg_sum: usize = c.iter().map(|&v| g.degree(v)).sum();
            c.len() == k && deg_sum == 2 * (k - 1) && c.iter().all(|&v| g.degree(v) <= 2)
        })
        .count()
}

/// Adjacency bitmask rows of a small graph.
pub fn adjacency_bits(n: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    let mut rows = vec![0u32; n];
    for &(a, b) in edges {
        rows[a] |= 1 << b;
        rows[b] |= 1 << a;
    }
    rows
}

/// Upper-triangle bit string of the graph relabelled by `perm` (old -> new).
fn encode(rows: &[u32], perm: &[usize]) -> u64 {
    let n = rows.len();
    let mut inv = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            code <<= 1;
            if rows[inv[i]] >> inv[j] & 1 == 1 {
                code |= 1;
            }
        }
    }
    code
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Least encoding over the permutations for which `allowed` holds. Two
/// graphs get the same value exactly when an allowed permutation maps one
/// onto the other, provided `allowed` describes a group.
pub fn brute_canonical(rows: &[u32], perms: &[Vec<usize>], allowed: impl Fn(&[usize]) -> bool) -> u64 {
    perms.iter().filter(|p| allowed(p)).map(|p| encode(rows, p)).min().expect("some permutation allowed")
}

/// Every edge set on `n` labelled vertices, as edge lists.
pub fn all_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect())
        .collect()
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
    n == 0 || uf_components(&g).len() == 1
}

/// Vertices within `r` of `v`, by plain BFS.
pub fn bfs_within(g: &Graph, v: usize, r: usize) -> Vec<usize> {
    let mut dist = vec![INF; g.n()];
    dist[v] = 0;
    let mut q = VecDeque::from([v]);
    while let Some(x) = q.pop_front() {
        if dist[x] == r {
            continue;
        }
        for &y in g.neighbours(x) {
            if dist[y] == INF {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    (0..g.n()).filter(|&x| dist[x] != INF).collect()
}

/// Searches for a bijection between the rooted `r`-balls of `a` at `u` and
/// `b` at `v` that fixes the root, by backtracking with degree pruning.
pub fn rooted_balls_isomorphic(a: &Graph, u: usize, b: &Graph, v: usize, r: usize) -> bool {
    let va = bfs_within(a, u, r);
    let vb = bfs_within(b, v, r);
    if va.len() != vb.len() {
        return false;
    }
    let ha = a.induced(&va);
    let hb = b.induced(&vb);
    let ra = va.iter().position(|&x| x == u).unwrap();
    let rb = vb.iter().position(|&x| x == v).unwrap();
    if ha.edge_count() != hb.edge_count() {
        return false;
    }
    let k = ha.n();
    let mut map = vec![INF; k];
    let mut used = vec![false; k];
    map[ra] = rb;
    used[rb] = true;
    let order: Vec<usize> = (0..k).filter(|&x| x != ra).collect();
    fn extend(
        i: usize,
        order: &[usize],
        ha: &Graph,
        hb: &Graph,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let x = order[i];
        for y in 0..hb.n() {
            if used[y] || ha.degree(x) != hb.degree(y) {
                continue;
            }
            let ok = (0..ha.n()).all(|w| map[w] == INF || ha.has_edge(x, w) == hb.has_edge(y, map[w]));
            if ok {
                map[x] = y;
                used[y] = true;
                if extend(i + 1, order, ha, hb, map, used) {
                    return true;
                }
                map[x] = INF;
                used[y] = false;
            }
        }
        false
    }
    extend(0, &order, &ha, &hb, &mut map, &mut used)
}

/// Simple coin-flip G(n, p) from a seeded generator, independent of the
/// library sampler.
pub fn coin_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Sorted multiset of plain codes of the components of `g`.
pub fn component_codes(g: &Graph) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = uf_components(g)
        .iter()
        .map(|c| shotgun::canon::canonical_code_plain(&g.induced(c)).unwrap().as_bytes().to_vec())
        .collect();
    out.sort();
    out
}
