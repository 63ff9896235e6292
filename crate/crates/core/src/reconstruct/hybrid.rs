//! Reconstruction for `r >= 4` by splitting high- and low-degree vertices.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::overlap::edges_from_adjacency;
use super::{BallCollection, Reconstruction};
use crate::canon::{canonical_code_coloured, canonical_code_rooted, CanonicalCode};
use crate::graph::{Graph, RootedBall};

/// High-degree vertices (`V1`, degree at least `n p / 2`) are identified by
/// unique 3-balls and joined by the overlap method. Each low-degree
/// component, of at most `r - 3` vertices, is read from the ball of any of its
/// members together with its attachments to `V1`; it is seen once per
/// member, so multiplicities are divided by its size.
///
/// Without `p_hint`, `n p` is estimated by the mean degree.
pub fn hybrid_high_low_reconstruct(bc: &BallCollection, p_hint: Option<f64>) -> Reconstruction {
    let r = bc.radius();
    let n = bc.n();
    if r < 4 {
        return Reconstruction::not_applicable(format!("hybrid reconstruction needs radius at least 4, got {r}"));
    }
    if n == 0 {
        return Reconstruction::Exact(Graph::empty(0));
    }
    let np = match p_hint {
        Some(p) => n as f64 * p,
        None => bc.balls().iter().map(|b| b.degree(0)).sum::<usize>() as f64 / n as f64,
    };
    let threshold = np / 2.0;
    let high = |deg: usize| deg as f64 >= threshold;
    let in_v1: Vec<bool> = bc.balls().iter().map(|b| high(b.degree(0))).collect();

    let mut id: HashMap<CanonicalCode, usize> = HashMap::new();
    let v1_codes: Vec<(usize, CanonicalCode)> = (0..n)
        .into_par_iter()
        .filter(|&v| in_v1[v])
        .map(|v| (v, canonical_code_rooted(&bc.ball(v).sub_ball(0, 3))))
        .collect();
    for (v, c) in v1_codes {
        if id.insert(c, v).is_some() {
            return Reconstruction::not_applicable("3-balls of high-degree vertices are not unique");
        }
    }
    let lookup = |ball: &RootedBall, local: usize| -> Option<usize> {
        id.get(&canonical_code_rooted(&ball.sub_ball(local, 3))).copied()
    };

    // low-degree components, each described from one member's point of view
    let max_low = r - 3;
    let descriptors: Result<Vec<Option<(CanonicalCode, usize)>>, Reconstruction> = (0..n)
        .into_par_iter()
        .map(|v| {
            if in_v1[v] {
                return Ok(None);
            }
            let ball = bc.ball(v);
            let comp = match low_component(ball, &high, max_low) {
                Some(c) => c,
                None => {
                    return Err(Reconstruction::not_applicable(format!(
                        "low-degree component of vertex {v} has more than {max_low} vertices"
                    )))
                }
            };
            describe(ball, &comp, &high, &lookup).map(|d| Some((d, comp.len())))
        })
        .collect();
    let descriptors = match descriptors {
        Ok(d) => d,
        Err(e) => return e,
    };

    // H1 by overlap on 3-ball codes
    let adjacency: Result<Vec<Vec<usize>>, String> = (0..n)
        .into_par_iter()
        .map(|v| {
            if !in_v1[v] {
                return Ok(Vec::new());
            }
            let ball = bc.ball(v);
            let mut out = Vec::new();
            for &w in ball.neighbours(0) {
                if high(ball.degree(w as usize)) {
                    match lookup(ball, w as usize) {
                        Some(u) if u != v => out.push(u),
                        _ => return Err(format!("a high-degree neighbour of {v} matches no vertex")),
                    }
                }
            }
            out.sort_unstable();
            Ok(out)
        })
        .collect();
    let h1 = match adjacency.and_then(|a| edges_from_adjacency(&a)) {
        Ok(g) => g,
        Err(e) => return Reconstruction::inconsistent(e),
    };

    let mut seen: BTreeMap<CanonicalCode, (usize, usize)> = BTreeMap::new();
    for (code, size) in descriptors.into_iter().flatten() {
        seen.entry(code).or_insert((0, size)).0 += 1;
    }
    let mut edges: Vec<(usize, usize)> = h1.edges().collect();
    let mut free = (0..n).filter(|&v| !in_v1[v]);
    let mut placed = 0usize;
    for (code, (count, size)) in &seen {
        if count % size != 0 {
            return Reconstruction::inconsistent(format!(
                "a low-degree component of size {size} was seen {count} times"
            ));
        }
        let (colours, local_edges) = code.decode().expect("descriptor codes are well formed");
        for _ in 0..count / size {
            let mut map = Vec::with_capacity(colours.len());
            for &c in &colours {
                map.push(match c {
                    0 => match free.next() {
                        Some(x) => x,
                        None => return Reconstruction::inconsistent("too many low-degree vertices"),
                    },
                    c => c as usize - 1,
                });
            }
            placed += size;
            edges.extend(local_edges.iter().map(|&(a, b)| {
                let (x, y) = (map[a], map[b]);
                (x.min(y), x.max(y))
            }));
        }
    }
    if placed + in_v1.iter().filter(|&&b| b).count() != n {
        return Reconstruction::inconsistent("low-degree components do not cover the low-degree vertices");
    }
    let all_high = placed == 0;
    match Graph::from_edges(n, edges) {
        Ok(g) if all_high => Reconstruction::Exact(g),
        Ok(g) => Reconstruction::Isomorphic(g),
        Err(e) => Reconstruction::inconsistent(e.to_string()),
    }
}

/// Local ids of the root's component among low-degree vertices, or `None`
/// if it has more than `max` vertices. Only vertices within `max - 1` of the
/// root are visited, so their degrees are exact whenever `max <= r - 3`.
fn low_component(ball: &RootedBall, high: &impl Fn(usize) -> bool, max: usize) -> Option<Vec<usize>> {
    let mut comp = vec![0usize];
    let mut mark = vec![false; ball.len()];
    mark[0] = true;
    let mut head = 0;
    while head < comp.len() {
        let x = comp[head];
        head += 1;
        for &y in ball.neighbours(x) {
            let y = y as usize;
            if !mark[y] && !high(ball.degree(y)) {
                mark[y] = true;
                comp.push(y);
                if comp.len() > max {
                    return None;
                }
            }
        }
    }
    Some(comp)
}

/// Coloured code of a low component plus its edges to identified
/// high-degree vertices: members get colour 0, high vertex `i` colour `i + 1`.
fn describe(
    ball: &RootedBall,
    comp: &[usize],
    high: &impl Fn(usize) -> bool,
    lookup: &impl Fn(&RootedBall, usize) -> Option<usize>,
) -> Result<CanonicalCode, Reconstruction> {
    let mut index: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut colours = vec![0u32; comp.len()];
    let mut edges = Vec::new();
    for (i, &x) in comp.iter().enumerate() {
        for &y in ball.neighbours(x) {
            let y = y as usize;
            if high(ball.degree(y)) {
                let Some(h) = lookup(ball, y) else {
                    return Err(Reconstruction::inconsistent("an attached high-degree vertex matches no vertex"));
                };
                let j = *index.entry(y).or_insert_with(|| {
                    colours.push(h as u32 + 1);
                    colours.len() - 1
                });
                edges.push((i, j));
            } else if let Some(&j) = index.get(&y) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let g = Graph::from_edges(colours.len(), edges).map_err(|e| Reconstruction::inconsistent(e.to_string()))?;
    Ok(canonical_code_coloured(&g, &colours))
}
