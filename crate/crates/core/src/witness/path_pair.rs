//! Two path components on `2r + 1` vertices: moving one end vertex across
//! gives `P_2r ⊔ P_2r+2`, which has the same `r`-balls.

use super::{certified, CertificateKind, FinderKind, FinderResult, FinderStats};
use crate::graph::{components, Graph};

fn is_path_component(g: &Graph, comp: &[usize]) -> bool {
    let edges: usize = comp.iter().map(|&v| g.degree(v)).sum::<usize>() / 2;
    edges + 1 == comp.len() && comp.iter().all(|&v| g.degree(v) <= 2)
}

/// Vertices of a path component in order, starting from its smaller end.
fn walk(g: &Graph, comp: &[usize]) -> Vec<usize> {
    if comp.len() == 1 {
        return comp.to_vec();
    }
    let start = *comp.iter().filter(|&&v| g.degree(v) == 1).min().expect("a path has ends");
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < comp.len() {
        let next = *g.neighbours(cur).iter().find(|&&w| w != prev).expect("path continues");
        order.push(next);
        prev = cur;
        cur = next;
    }
    order
}

/// Components of `g` that are paths on `k` vertices, ordered by smallest vertex.
fn path_components(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    components(g)
        .into_iter()
        .filter(|c| c.len() == k && is_path_component(g, c))
        .collect()
}

/// Number of components that are paths on `2r + 1` vertices.
pub fn count_path_components(g: &Graph, r: usize) -> usize {
    path_components(g, 2 * r + 1).len()
}

/// Takes the first two `P_2r+1` components, removes the last edge
/// `a_{2r-1} a_{2r}` of the first and joins `a_{2r}` to the end `b_0` of the
/// second.
pub fn find_path_pair_witness(g: &Graph, r: usize) -> FinderResult {
    let paths = if r == 0 { Vec::new() } else { path_components(g, 2 * r + 1) };
    let mut stats = FinderStats { path_components: Some(paths.len()), ..FinderStats::default() };
    let mut witness = None;
    if paths.len() >= 2 {
        stats.candidates = 1;
        let a = walk(g, &paths[0]);
        let b = walk(g, &paths[1]);
        let end = a[2 * r];
        witness = certified(
            g,
            FinderKind::PathPair,
            r,
            vec![(a[2 * r - 1], end)],
            vec![(end, b[0])],
            vec![end, b[0]],
            CertificateKind::ComponentMultiset,
        );
        if witness.is_none() {
            stats.rejected = 1;
        }
    }
    FinderResult { witness, stats }
}
