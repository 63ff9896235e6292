//! Reconstruction from unique `(r-1)`-balls.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{BallCollection, Reconstruction};
use crate::canon::{canonical_code_rooted, CanonicalCode};
use crate::graph::Graph;

/// Identifies every vertex by the code of its `(r-1)`-ball, then reads each
/// vertex's neighbours off its own `r`-ball: a neighbour's `(r-1)`-ball lies
/// entirely inside that ball, so it can be matched to a vertex id.
pub fn overlap_reconstruct(bc: &BallCollection) -> Reconstruction {
    let r = bc.radius();
    if r < 2 && bc.n() > 1 {
        return Reconstruction::not_applicable("overlap needs radius at least 2");
    }
    let inner = r.saturating_sub(1);
    let codes: Vec<CanonicalCode> =
        bc.balls().par_iter().map(|b| canonical_code_rooted(&b.sub_ball(0, inner))).collect();
    let mut id: HashMap<&CanonicalCode, usize> = HashMap::with_capacity(codes.len());
    for (v, c) in codes.iter().enumerate() {
        if id.insert(c, v).is_some() {
            return Reconstruction::not_applicable(format!("{}-balls are not unique", inner));
        }
    }

    let adjacency: Result<Vec<Vec<usize>>, String> = bc
        .balls()
        .par_iter()
        .enumerate()
        .map(|(v, ball)| {
            let mut out = Vec::with_capacity(ball.degree(0));
            for &w in ball.neighbours(0) {
                let code = canonical_code_rooted(&ball.sub_ball(w as usize, inner));
                match id.get(&code) {
                    Some(&u) if u != v => out.push(u),
                    _ => return Err(format!("a neighbour of vertex {v} matches no other vertex")),
                }
            }
            out.sort_unstable();
            Ok(out)
        })
        .collect();
    let adjacency = match adjacency {
        Ok(a) => a,
        Err(e) => return Reconstruction::inconsistent(e),
    };
    edges_from_adjacency(&adjacency).map_or_else(Reconstruction::inconsistent, Reconstruction::Exact)
}

/// Builds a graph from per-vertex neighbour lists that must agree from both
/// sides.
pub(super) fn edges_from_adjacency(adjacency: &[Vec<usize>]) -> Result<Graph, String> {
    let mut edges = Vec::new();
    for (v, list) in adjacency.iter().enumerate() {
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("vertex {v} sees the same neighbour twice"));
        }
        for &u in list {
            if adjacency[u].binary_search(&v).is_err() {
                return Err(format!("edge {v}-{u} is seen from one side only"));
            }
            if v < u {
                edges.push((v, u));
            }
        }
    }
    Graph::from_edges(adjacency.len(), edges).map_err(|e| e.to_string())
}
