//! Edge colours read from 2-balls, and reconstruction from coloured stars.

use std::collections::BTreeMap;
use std::fmt;

use super::Reconstruction;
use crate::canon::{CanonError, CanonicalCode, EdgeRootedGraph};
use crate::graph::{Graph, GraphError, RootedBall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColourMode {
    /// Isomorphism class of `C_uv`.
    Full,
    /// Paired degree sequences into the far side.
    Fast,
}

impl fmt::Display for ColourMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColourMode::Full => "full",
            ColourMode::Fast => "fast",
        })
    }
}

/// Unordered pair of sorted count sequences; `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FastSignature {
    pub lo: Vec<u32>,
    pub hi: Vec<u32>,
}

impl FastSignature {
    pub fn new(mut a: Vec<u32>, mut b: Vec<u32>) -> Self {
        a.sort_unstable();
        b.sort_unstable();
        if a <= b {
            FastSignature { lo: a, hi: b }
        } else {
            FastSignature { lo: b, hi: a }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeColour {
    Full(CanonicalCode),
    Fast(FastSignature),
}

/// Distances from the root and from local vertex `v` inside a ball of
/// radius at least 2, with the root adjacent to `v`.
fn ball_distances(ball: &RootedBall, v: usize) -> Result<Vec<u32>, GraphError> {
    if ball.radius() < 2 {
        return Err(GraphError::RadiusTooLarge { requested: 2, radius: ball.radius() });
    }
    if !ball.neighbours(0).contains(&(v as u32)) {
        return Err(GraphError::MissingEdge(ball.centre(), v));
    }
    Ok(ball.local_distances(v, 2))
}

/// FULL colour of the edge from the root of `ball` to local vertex `v`.
///
/// Every vertex within distance 2 of both endpoints, and every path that
/// witnesses it, lies inside the root's 2-ball.
pub fn colour_edge_full_in_ball(ball: &RootedBall, v: usize) -> Result<EdgeColour, GraphError> {
    let dv = ball_distances(ball, v)?;
    let keep: Vec<usize> =
        (0..ball.len()).filter(|&x| ball.distance(x) <= 2 && dv[x] <= 2).collect();
    let mut index = vec![u32::MAX; ball.len()];
    for (i, &x) in keep.iter().enumerate() {
        index[x] = i as u32;
    }
    let adj: Vec<Vec<u32>> = keep
        .iter()
        .map(|&x| {
            let mut l: Vec<u32> = ball
                .neighbours(x)
                .iter()
                .map(|&y| index[y as usize])
                .filter(|&j| j != u32::MAX)
                .collect();
            l.sort_unstable();
            l
        })
        .collect();
    let s = EdgeRootedGraph::from_adjacency(adj, index[0] as usize, index[v] as usize)
        .expect("root and v are adjacent");
    Ok(EdgeColour::Full(s.unordered_code()))
}

/// FAST colour of the edge from the root of `ball` to local vertex `v`.
pub fn colour_edge_fast_in_ball(ball: &RootedBall, v: usize) -> Result<EdgeColour, GraphError> {
    let dv = ball_distances(ball, v)?;
    let du = |x: usize| ball.distance(x) as u32;
    // for w in Γ1(v): edges into Γ2(u) \ Γ1(v)
    let a: Vec<u32> = ball
        .neighbours(v)
        .iter()
        .map(|&w| {
            ball.neighbours(w as usize)
                .iter()
                .filter(|&&z| du(z as usize) == 2 && dv[z as usize] != 1)
                .count() as u32
        })
        .collect();
    // for w in Γ1(u): edges into Γ2(v) \ Γ1(u)
    let b: Vec<u32> = ball
        .neighbours(0)
        .iter()
        .map(|&w| {
            ball.neighbours(w as usize)
                .iter()
                .filter(|&&z| dv[z as usize] == 2 && du(z as usize) != 1)
                .count() as u32
        })
        .collect();
    Ok(EdgeColour::Fast(FastSignature::new(a, b)))
}

pub(super) fn colour_in_ball(ball: &RootedBall, v: usize, mode: ColourMode) -> EdgeColour {
    match mode {
        ColourMode::Full => colour_edge_full_in_ball(ball, v),
        ColourMode::Fast => colour_edge_fast_in_ball(ball, v),
    }
    .expect("v is a neighbour of the root in a 2-ball")
}

fn check_edge(g: &Graph, u: usize, v: usize) -> Result<(), CanonError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if !g.has_edge(u, v) {
        return Err(CanonError::NotAnEdge(u, v));
    }
    Ok(())
}

/// FULL colour of `uv` computed on the whole graph.
pub fn colour_edge_full(g: &Graph, u: usize, v: usize) -> Result<EdgeColour, CanonError> {
    check_edge(g, u, v)?;
    let du = g.distances_from(u, 2);
    let dv = g.distances_from(v, 2);
    let keep: Vec<usize> = (0..g.n()).filter(|&x| du[x].is_some() && dv[x].is_some()).collect();
    let h = g.induced(&keep);
    let iu = keep.iter().position(|&x| x == u).unwrap();
    let iv = keep.iter().position(|&x| x == v).unwrap();
    let s = EdgeRootedGraph::new(&h, iu, iv)?;
    Ok(EdgeColour::Full(s.unordered_code()))
}

/// FAST colour of `uv` computed on the whole graph.
pub fn colour_edge_fast(g: &Graph, u: usize, v: usize) -> Result<EdgeColour, CanonError> {
    check_edge(g, u, v)?;
    let side = |a: usize, b: usize| -> Vec<u32> {
        // for w in Γ1(b): edges into Γ2(a) \ Γ1(b)
        let da = g.distances_from(a, 2);
        g.neighbours(b)
            .iter()
            .map(|&w| {
                g.neighbours(w)
                    .iter()
                    .filter(|&&z| da[z] == Some(2) && !g.has_edge(b, z))
                    .count() as u32
            })
            .collect()
    };
    Ok(EdgeColour::Fast(FastSignature::new(side(u, v), side(v, u))))
}

/// The colours on the edges at one vertex, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredStar {
    pub centre: usize,
    pub incident: Vec<(EdgeColour, usize)>,
}

impl ColouredStar {
    pub fn from_colours(centre: usize, colours: impl IntoIterator<Item = EdgeColour>) -> Self {
        let mut counts: BTreeMap<EdgeColour, usize> = BTreeMap::new();
        for c in colours {
            *counts.entry(c).or_insert(0) += 1;
        }
        ColouredStar { centre, incident: counts.into_iter().collect() }
    }

    pub fn degree(&self) -> usize {
        self.incident.iter().map(|(_, m)| m).sum()
    }
}

/// Rebuilds a graph on `n` vertices from per-vertex colour counts, assuming
/// each colour class is a star or a triangle. Those are the only graphs with
/// no two disjoint edges, and the count vector tells them apart.
pub fn star_colouring_reconstruct(n: usize, stars: &[ColouredStar]) -> Reconstruction {
    let mut classes: BTreeMap<&EdgeColour, Vec<(usize, usize)>> = BTreeMap::new();
    for s in stars {
        if s.centre >= n {
            return Reconstruction::inconsistent(format!("star centre {} out of range", s.centre));
        }
        for (c, m) in &s.incident {
            if *m > 0 {
                classes.entry(c).or_default().push((s.centre, *m));
            }
        }
    }
    let mut edges = Vec::new();
    for members in classes.values() {
        let top = members.iter().map(|&(_, m)| m).max().unwrap_or(0);
        let centres: Vec<usize> = members.iter().filter(|&&(_, m)| m == top).map(|&(v, _)| v).collect();
        let is_triangle = members.len() == 3 && top == 2 && centres.len() == 3;
        let is_edge = members.len() == 2 && top == 1;
        let is_star = top >= 2 && centres.len() == 1 && members.len() == top + 1;
        if is_triangle || is_edge {
            for (i, &(a, _)) in members.iter().enumerate() {
                for &(b, _) in &members[i + 1..] {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        } else if is_star {
            let c = centres[0];
            edges.extend(members.iter().filter(|&&(v, _)| v != c).map(|&(v, _)| (c.min(v), c.max(v))));
        } else {
            let counts: Vec<usize> = members.iter().map(|&(_, m)| m).collect();
            return Reconstruction::not_applicable(format!(
                "a colour class with counts {counts:?} is neither a star nor a triangle"
            ));
        }
    }
    edges.sort_unstable();
    match Graph::from_edges(n, edges) {
        Ok(g) => Reconstruction::Exact(g),
        Err(e) => Reconstruction::inconsistent(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{extract_ball, sample_gnp, GnpParams};

    fn local_of(ball: &RootedBall, v: usize) -> usize {
        ball.labels().unwrap().iter().position(|&x| x == v).unwrap()
    }

    #[test]
    fn p3_full_colour_is_whole_path() {
        let g = Graph::path(3);
        let c = colour_edge_full(&g, 0, 1).unwrap();
        let whole = EdgeRootedGraph::new(&g, 0, 1).unwrap().unordered_code();
        assert_eq!(c, EdgeColour::Full(whole));
    }

    #[test]
    fn triangle_edges_share_colour() {
        let g = Graph::complete(3);
        let a = colour_edge_full(&g, 0, 1).unwrap();
        assert_eq!(a, colour_edge_full(&g, 1, 2).unwrap());
        assert_eq!(a, colour_edge_full(&g, 0, 2).unwrap());
    }

    #[test]
    fn p3_fast_colour_by_hand() {
        // Γ1(b) = {a, c}; Γ2(a) \ Γ1(b) is empty, so both counts are 0.
        // Γ1(a) = {b}; Γ2(b) is empty, so the other side is (0).
        let g = Graph::path(3);
        let c = colour_edge_fast(&g, 0, 1).unwrap();
        assert_eq!(c, EdgeColour::Fast(FastSignature::new(vec![0, 0], vec![0])));
        assert_eq!(c, colour_edge_fast(&g, 1, 0).unwrap());
    }

    #[test]
    fn isolated_edge_fast_colour() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let c = colour_edge_fast(&g, 0, 1).unwrap();
        assert_eq!(c, EdgeColour::Fast(FastSignature::new(vec![0], vec![0])));
    }

    #[test]
    fn non_edges_rejected() {
        let g = Graph::path(3);
        assert!(colour_edge_full(&g, 0, 2).is_err());
        assert!(colour_edge_fast(&g, 0, 2).is_err());
        let b = extract_ball(&g, 0, 2).unwrap();
        assert!(colour_edge_fast_in_ball(&b, 2).is_err());
        let b1 = extract_ball(&g, 0, 1).unwrap();
        assert!(colour_edge_full_in_ball(&b1, 1).is_err());
    }

    #[test]
    fn ball_colours_match_whole_graph() {
        for (seed, p) in [(1u64, 0.3), (2, 0.2), (3, 0.1)] {
            let g = sample_gnp(GnpParams::new(40, p, seed).unwrap());
            for u in 0..g.n() {
                let ball = extract_ball(&g, u, 2).unwrap();
                for &v in g.neighbours(u) {
                    let l = local_of(&ball, v);
                    assert_eq!(colour_edge_full_in_ball(&ball, l).unwrap(), colour_edge_full(&g, u, v).unwrap());
                    assert_eq!(colour_edge_fast_in_ball(&ball, l).unwrap(), colour_edge_fast(&g, u, v).unwrap());
                }
            }
        }
    }

    #[test]
    fn star_and_triangle_classes() {
        let red = EdgeColour::Fast(FastSignature::new(vec![1], vec![]));
        let blue = EdgeColour::Fast(FastSignature::new(vec![2], vec![]));
        let mut stars: Vec<ColouredStar> = (0..8).map(|v| ColouredStar::from_colours(v, [])).collect();
        stars[0] = ColouredStar::from_colours(0, vec![red.clone(); 3]);
        for v in 1..4 {
            stars[v] = ColouredStar::from_colours(v, [red.clone()]);
        }
        for v in 4..7 {
            stars[v] = ColouredStar::from_colours(v, vec![blue.clone(); 2]);
        }
        let out = star_colouring_reconstruct(8, &stars);
        let expected = Graph::from_edges(8, [(0, 1), (0, 2), (0, 3), (4, 5), (4, 6), (5, 6)]).unwrap();
        assert_eq!(out, Reconstruction::Exact(expected));
    }

    #[test]
    fn disjoint_edges_in_one_colour_rejected() {
        let red = EdgeColour::Fast(FastSignature::new(vec![], vec![]));
        let stars: Vec<_> = (0..4).map(|v| ColouredStar::from_colours(v, [red.clone()])).collect();
        assert!(matches!(star_colouring_reconstruct(4, &stars), Reconstruction::NotApplicable(_)));
    }
}
