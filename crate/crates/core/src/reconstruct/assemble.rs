//! Assembly of graphs whose components all fit inside one ball.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use super::{BallCollection, Reconstruction};
use crate::canon::{ball_codes, canonical_code_rooted, CanonicalCode};
use crate::graph::Graph;

/// Repeatedly takes a largest remaining ball, which in this regime is a
/// whole component, emits it, and strikes the balls of its vertices from the
/// collection. Ties go to the least code.
///
/// Not applicable as soon as some ball has `2r + 1` or more vertices.
pub fn assemble_small_components(bc: &BallCollection) -> Reconstruction {
    let r = bc.radius();
    if let Some((v, b)) = bc.balls().iter().enumerate().find(|(_, b)| b.len() > 2 * r) {
        return Reconstruction::not_applicable(format!(
            "ball of vertex {v} has {} vertices, at least 2r+1 = {}",
            b.len(),
            2 * r + 1
        ));
    }

    let mut remaining: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
    let mut example: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
    for (v, b) in bc.balls().iter().enumerate() {
        let code = canonical_code_rooted(b);
        *remaining.entry(code.clone()).or_insert(0) += 1;
        example.entry(code).or_insert(v);
    }
    let mut order: Vec<(usize, CanonicalCode)> =
        example.iter().map(|(c, &v)| (bc.ball(v).len(), c.clone())).collect();
    order.sort_by(|a, b| (Reverse(a.0), &a.1).cmp(&(Reverse(b.0), &b.1)));

    let mut edges = Vec::new();
    let mut next = 0usize;
    for (_, code) in &order {
        while remaining[code] > 0 {
            let component = bc.ball(example[code]).to_graph();
            for c in ball_codes(&component, r) {
                match remaining.get_mut(&c) {
                    Some(m) if *m > 0 => *m -= 1,
                    _ => {
                        return Reconstruction::inconsistent(
                            "a ball of an assembled component is missing from the collection",
                        )
                    }
                }
            }
            edges.extend(component.edges().map(|(a, b)| (next + a, next + b)));
            next += component.n();
        }
    }
    debug_assert_eq!(next, bc.n());
    match Graph::from_edges(next, edges) {
        Ok(g) => Reconstruction::Isomorphic(g),
        Err(e) => Reconstruction::inconsistent(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::components;

    fn sizes(g: &Graph) -> Vec<usize> {
        let mut s: Vec<usize> = components(g).iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn disjoint_edges_and_isolated_vertices() {
        let g = Graph::from_edges(8, [(0, 1), (2, 3), (4, 5)]).unwrap();
        let out = assemble_small_components(&BallCollection::from_graph(&g, 1));
        assert_eq!(out.tag(), super::super::OutcomeTag::Isomorphic);
        assert_eq!(sizes(out.graph().unwrap()), vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn paths_within_radius_two() {
        let g = Graph::path(3).disjoint_union(&Graph::path(4)).disjoint_union(&Graph::empty(1));
        let out = assemble_small_components(&BallCollection::from_graph(&g, 2));
        let h = out.graph().expect("applicable");
        assert_eq!(sizes(h), vec![1, 3, 4]);
        assert_eq!(h.edge_count(), 5);
    }

    #[test]
    fn large_ball_aborts() {
        let g = Graph::path(3);
        let out = assemble_small_components(&BallCollection::from_graph(&g, 1));
        assert!(matches!(out, Reconstruction::NotApplicable(_)));
    }

    #[test]
    fn contradictory_collection_is_inconsistent() {
        // an edge's ball without its partner
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let lone = Graph::empty(1);
        let mut balls = BallCollection::from_graph(&g, 1).balls().to_vec();
        balls[1] = crate::graph::extract_ball(&lone, 0, 1).unwrap();
        let balls = balls
            .into_iter()
            .enumerate()
            .map(|(i, b)| crate::graph::RootedBall::from_local_edges(i, 1, b.len(), &b.local_edges()).unwrap())
            .collect();
        let bc = BallCollection::new(1, balls).unwrap();
        assert!(matches!(assemble_small_components(&bc), Reconstruction::Inconsistent(_)));
    }
}
