//! Sampling finders for the four-vertex swaps at radius 1 and 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{certified, CertificateKind, FinderKind, FinderOptions, FinderResult, FinderStats, SwapWitness};
use crate::graph::Graph;

/// Candidates are drawn sequentially and checked in parallel blocks; the
/// first passing candidate in draw order wins, whatever the thread count.
const BLOCK: u64 = 4096;

/// Integer range `[ceil(c - w), floor(c + w)]`.
fn window(centre: f64, width: f64) -> (usize, usize) {
    let lo = (centre - width).ceil().max(0.0) as usize;
    let hi = (centre + width).floor().max(-1.0);
    (lo, if hi < 0.0 { 0 } else { hi as usize })
}

fn in_window(x: usize, (lo, hi): (usize, usize)) -> bool {
    lo <= x && x <= hi
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn pairwise_disjoint(sets: &[&[usize]]) -> bool {
    (0..sets.len()).all(|i| (i + 1..sets.len()).all(|j| disjoint(sets[i], sets[j])))
}

fn all_distinct<T: PartialEq>(xs: &[T]) -> bool {
    (0..xs.len()).all(|i| (i + 1..xs.len()).all(|j| xs[i] != xs[j]))
}

/// `(u, v, x, y)` with `uv` and `xy` edges, none of `xu, xv, yu, yv` edges,
/// and the four vertices distinct.
fn basic(g: &Graph, [u, v, x, y]: [usize; 4]) -> bool {
    all_distinct(&[u, v, x, y])
        && !g.has_edge(x, u)
        && !g.has_edge(x, v)
        && !g.has_edge(y, u)
        && !g.has_edge(y, v)
}

/// Draws edge pairs from a seeded generator and returns the first candidate
/// that passes `check` and whose swap verifies.
fn search(
    g: &Graph,
    opts: &FinderOptions,
    check: impl Fn([usize; 4]) -> bool + Sync,
    build: impl Fn([usize; 4]) -> Option<SwapWitness>,
) -> FinderResult {
    let edges = g.edge_vec();
    let mut stats = FinderStats::default();
    let m = edges.len() as u64;
    if m < 2 {
        return FinderResult { witness: None, stats };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut drawn = 0u64;
    while drawn < opts.budget {
        let count = BLOCK.min(opts.budget - drawn);
        let block: Vec<[usize; 4]> = (0..count)
            .map(|_| {
                let i = rng.random_range(0..m);
                let mut j = rng.random_range(0..m - 1);
                if j >= i {
                    j += 1;
                }
                let flips: u8 = rng.random();
                let (a, b) = edges[i as usize];
                let (c, d) = edges[j as usize];
                let (u, v) = if flips & 1 == 0 { (a, b) } else { (b, a) };
                let (x, y) = if flips & 2 == 0 { (c, d) } else { (d, c) };
                [u, v, x, y]
            })
            .collect();
        let passed: Vec<bool> = block.par_iter().map(|&t| check(t)).collect();
        for (k, (&t, ok)) in block.iter().zip(passed).enumerate() {
            if !ok {
                continue;
            }
            match build(t) {
                Some(w) => {
                    stats.candidates = drawn + k as u64 + 1;
                    return FinderResult { witness: Some(w), stats };
                }
                None => stats.rejected += 1,
            }
        }
        drawn += count;
    }
    stats.candidates = drawn;
    FinderResult { witness: None, stats }
}

/// Radius-1 swap: edges `xy, uv` with no edges across, four distinct degrees
/// within `(np)^{2/3}` of `np`, and pairwise disjoint neighbourhoods.
/// `G' = G - {xy, uv} + {xu, yv}`; certified by the number of edges between
/// the degree classes of `x` and `y`.
pub fn find_r1_witness(g: &Graph, opts: &FinderOptions) -> FinderResult {
    let np = g.n() as f64 * opts.p_or_estimate(g);
    let deg_window = window(np, np.powf(2.0 / 3.0));
    let check = |t: [usize; 4]| {
        let degrees = t.map(|a| g.degree(a));
        basic(g, t)
            && all_distinct(&degrees)
            && degrees.iter().all(|&d| in_window(d, deg_window))
            && pairwise_disjoint(&t.map(|a| g.neighbours(a)))
    };
    let build = |[u, v, x, y]: [usize; 4]| {
        certified(
            g,
            FinderKind::R1,
            1,
            vec![(x, y), (u, v)],
            vec![(x, u), (y, v)],
            vec![u, v, x, y],
            CertificateKind::DegreeClassEdge,
        )
    };
    search(g, opts, check, build)
}

/// `Γ2(i)`, sorted.
fn second_neighbourhood(g: &Graph, i: usize) -> Vec<usize> {
    let mut out: Vec<usize> = g
        .neighbours(i)
        .iter()
        .flat_map(|&a| g.neighbours(a).iter().copied())
        .filter(|&b| b != i && !g.has_edge(i, b))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `N_2^{ij}(i) = (Γ1(i) \ {j}) ∪ (Γ2(i) \ Γ1(j))`, sorted.
fn one_sided(g: &Graph, i: usize, j: usize, gamma2: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = g.neighbours(i).iter().copied().filter(|&a| a != j).collect();
    out.extend(gamma2.iter().copied().filter(|&b| !g.has_edge(j, b)));
    out.sort_unstable();
    out
}

fn neighbourhood_is_independent(g: &Graph, i: usize) -> bool {
    let nb = g.neighbours(i);
    nb.iter().all(|&a| disjoint(g.neighbours(a), nb))
}

/// Radius-2 swap: edges `xy, uv` with no edges across, `d(x) = d(v)`,
/// `d(y) = d(u)`, degrees within `(np)^{2/3}` of `np`, four distinct `|Γ2|`
/// within `(n²p²)^{2/3}` of `n²p²`, independent neighbourhoods and pairwise
/// disjoint one-sided 2-neighbourhoods. `G' = G - {xy, uv} + {xu, yv}`;
/// certified by the number of edges between the `|Γ2|` classes of `x` and `y`.
pub fn find_r2_witness(g: &Graph, opts: &FinderOptions) -> FinderResult {
    let np = g.n() as f64 * opts.p_or_estimate(g);
    let deg_window = window(np, np.powf(2.0 / 3.0));
    let n2p2 = np * np;
    let ball_window = window(n2p2, n2p2.powf(2.0 / 3.0));
    let check = |t: [usize; 4]| {
        let [u, v, x, y] = t;
        if !basic(g, t) || g.degree(x) != g.degree(v) || g.degree(y) != g.degree(u) {
            return false;
        }
        if !t.iter().all(|&a| in_window(g.degree(a), deg_window)) {
            return false;
        }
        if !t.iter().all(|&a| neighbourhood_is_independent(g, a)) {
            return false;
        }
        let g2 = t.map(|a| second_neighbourhood(g, a));
        let sizes = g2.each_ref().map(Vec::len);
        if !all_distinct(&sizes) || !sizes.iter().all(|&s| in_window(s, ball_window)) {
            return false;
        }
        let sides = [
            one_sided(g, x, y, &g2[2]),
            one_sided(g, y, x, &g2[3]),
            one_sided(g, v, u, &g2[1]),
            one_sided(g, u, v, &g2[0]),
        ];
        pairwise_disjoint(&sides.each_ref().map(Vec::as_slice))
    };
    let build = |[u, v, x, y]: [usize; 4]| {
        certified(
            g,
            FinderKind::R2,
            2,
            vec![(x, y), (u, v)],
            vec![(x, u), (y, v)],
            vec![u, v, x, y],
            CertificateKind::Ball2ClassEdge,
        )
    };
    search(g, opts, check, build)
}
