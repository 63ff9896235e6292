mod common;

use std::collections::BTreeMap;

use common::{component_codes, uf_component_sizes};
use shotgun::canon::{ball_multiset, balls_unique, canonical_code_plain, EdgeRootedGraph};
use shotgun::graph::{extract_ball, max_component_size, sample_gnp, GnpParams, Graph};
use shotgun::reconstruct::{
    assemble_small_components, colour_edge_fast, colour_edge_fast_in_ball, colour_edge_full,
    colour_edge_full_in_ball, hybrid_high_low_reconstruct, overlap_reconstruct, reconstruct,
    star_colouring_reconstruct, two_ball_reconstruct, Algorithm, BallCollection, ColourMode, ColouredStar,
    EdgeColour, FastSignature, OutcomeTag, Reconstruction,
};

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    sample_gnp(GnpParams::new(n, p, seed).unwrap())
}

fn sizes(g: &Graph) -> Vec<usize> {
    uf_component_sizes(g)
}

/// True when two vertex-disjoint edges get the same colour, computed on the
/// whole graph.
fn colour_collision(g: &Graph, mode: ColourMode) -> bool {
    let mut classes: BTreeMap<EdgeColour, Vec<(usize, usize)>> = BTreeMap::new();
    for (u, v) in g.edges() {
        let c = match mode {
            ColourMode::Full => colour_edge_full(g, u, v),
            ColourMode::Fast => colour_edge_fast(g, u, v),
        }
        .unwrap();
        classes.entry(c).or_default().push((u, v));
    }
    classes.values().any(|es| {
        es.iter().enumerate().any(|(i, &(a, b))| es[i + 1..].iter().any(|&(c, d)| a != c && a != d && b != c && b != d))
    })
}

#[test]
fn assemble_small_examples() {
    let g = Graph::from_edges(8, [(0, 1), (2, 3), (4, 5)]).unwrap();
    let out = assemble_small_components(&BallCollection::from_graph(&g, 1));
    assert_eq!(out.tag(), OutcomeTag::Isomorphic);
    assert_eq!(sizes(out.graph().unwrap()), vec![1, 1, 2, 2, 2]);

    let h = Graph::path(3).disjoint_union(&Graph::path(4)).disjoint_union(&Graph::empty(1));
    let out = reconstruct(&BallCollection::from_graph(&h, 2), Algorithm::Assemble);
    let got = out.graph().expect("assembled");
    assert_eq!(sizes(got), vec![1, 3, 4]);
    assert_eq!(component_codes(got), component_codes(&h));

    let big = Graph::path(3);
    assert_eq!(assemble_small_components(&BallCollection::from_graph(&big, 1)).tag(), OutcomeTag::NotApplicable);
}

#[test]
fn assemble_subcritical_seeds() {
    let n = 500;
    let p = (n as f64).powf(-1.6);
    let mut applicable = 0;
    for seed in 0..100 {
        let g = gnp(n, p, seed);
        let out = reconstruct(&BallCollection::from_graph(&g, 1), Algorithm::Assemble);
        if max_component_size(&g) <= 2 {
            applicable += 1;
            let h = out.graph().unwrap_or_else(|| panic!("seed {seed}: {out:?}"));
            assert_eq!(component_codes(h), component_codes(&g), "seed {seed}");
        } else {
            assert_eq!(out.tag(), OutcomeTag::NotApplicable);
        }
    }
    assert!(applicable > 50, "{applicable}");
}

#[test]
fn overlap_examples() {
    let g = gnp(30, 0.3, 1);
    assert_eq!(overlap_reconstruct(&BallCollection::from_graph(&g, 1)).tag(), OutcomeTag::NotApplicable);
    let two_p3 = Graph::path(3).disjoint_union(&Graph::path(3));
    assert_eq!(overlap_reconstruct(&BallCollection::from_graph(&two_p3, 2)).tag(), OutcomeTag::NotApplicable);
}

#[test]
fn overlap_recovers_labelled_graph() {
    let mut applicable = 0;
    for seed in 0..10 {
        let g = gnp(100, 0.3, seed);
        let out = overlap_reconstruct(&BallCollection::from_graph(&g, 2));
        if balls_unique(&g, 1).0 {
            applicable += 1;
            match out {
                Reconstruction::Exact(h) => assert_eq!(h.edge_vec(), g.edge_vec()),
                other => panic!("seed {seed}: {other:?}"),
            }
        } else {
            assert_eq!(out.tag(), OutcomeTag::NotApplicable);
        }
    }
    assert!(applicable >= 8);
}

#[test]
fn full_colour_examples() {
    let p3 = Graph::path(3);
    let whole = EdgeRootedGraph::new(&p3, 0, 1).unwrap().unordered_code();
    assert_eq!(colour_edge_full(&p3, 0, 1).unwrap(), EdgeColour::Full(whole));
    let k3 = Graph::complete(3);
    let c = colour_edge_full(&k3, 0, 1).unwrap();
    assert_eq!(colour_edge_full(&k3, 1, 2).unwrap(), c);
    assert_eq!(colour_edge_full(&k3, 2, 0).unwrap(), c);
    assert!(colour_edge_full(&p3, 0, 2).is_err());
}

#[test]
fn fast_colour_examples() {
    let p3 = Graph::path(3);
    assert_eq!(colour_edge_fast(&p3, 0, 1).unwrap(), EdgeColour::Fast(FastSignature::new(vec![0, 0], vec![0])));
    let edge = Graph::path(2);
    let c = colour_edge_fast(&edge, 0, 1).unwrap();
    assert_eq!(c, colour_edge_fast(&edge, 1, 0).unwrap());
    assert_eq!(c, EdgeColour::Fast(FastSignature::new(vec![0], vec![0])));
    assert!(colour_edge_fast(&p3, 0, 2).is_err());
}

fn local_index(ball: &shotgun::graph::RootedBall, v: usize) -> usize {
    ball.labels().unwrap().iter().position(|&x| x == v).unwrap()
}

#[test]
fn colours_from_balls_match_whole_graph() {
    for (p, seed) in [(0.3, 1u64), (0.2, 2), (0.1, 3)] {
        let g = gnp(40, p, seed);
        for (u, v) in g.edges() {
            for (a, b) in [(u, v), (v, u)] {
                let ball = extract_ball(&g, a, 2).unwrap();
                let lb = local_index(&ball, b);
                assert_eq!(colour_edge_full_in_ball(&ball, lb).unwrap(), colour_edge_full(&g, a, b).unwrap());
                assert_eq!(colour_edge_fast_in_ball(&ball, lb).unwrap(), colour_edge_fast(&g, a, b).unwrap());
            }
        }
    }
}

#[test]
fn equal_full_colours_give_equal_fast_colours() {
    for seed in 0..5 {
        let g = gnp(60, 0.06, seed);
        let edges = g.edge_vec();
        let full: Vec<_> = edges.iter().map(|&(u, v)| colour_edge_full(&g, u, v).unwrap()).collect();
        let fast: Vec<_> = edges.iter().map(|&(u, v)| colour_edge_fast(&g, u, v).unwrap()).collect();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if full[i] == full[j] {
                    assert_eq!(fast[i], fast[j]);
                }
            }
        }
    }
}

#[test]
fn star_colouring_examples() {
    let red = || EdgeColour::Fast(FastSignature::new(vec![7], vec![]));
    let star = vec![
        ColouredStar::from_colours(0, vec![red(), red(), red()]),
        ColouredStar::from_colours(1, vec![red()]),
        ColouredStar::from_colours(2, vec![red()]),
        ColouredStar::from_colours(3, vec![red()]),
        ColouredStar::from_colours(4, vec![]),
    ];
    let out = star_colouring_reconstruct(5, &star);
    assert_eq!(out.graph().unwrap().edge_vec(), vec![(0, 1), (0, 2), (0, 3)]);
    let tri: Vec<_> = (0..3)
        .map(|v| ColouredStar::from_colours(v, vec![red(), red()]))
        .chain([ColouredStar::from_colours(3, vec![])])
        .collect();
    let out = star_colouring_reconstruct(4, &tri);
    assert_eq!(out.graph().unwrap().edge_vec(), vec![(0, 1), (0, 2), (1, 2)]);
    let bad: Vec<_> = (0..4).map(|v| ColouredStar::from_colours(v, vec![red()])).collect();
    assert_eq!(star_colouring_reconstruct(4, &bad).tag(), OutcomeTag::NotApplicable);
}

#[test]
fn star_colouring_on_random_full_colours() {
    let mut applicable = 0;
    for seed in 0..10 {
        let g = gnp(40, 0.3, seed);
        let out = two_ball_reconstruct(&BallCollection::from_graph(&g, 2), ColourMode::Full);
        if !colour_collision(&g, ColourMode::Full) {
            applicable += 1;
            assert_eq!(out.graph().map(Graph::edge_vec), Some(g.edge_vec()), "seed {seed}");
            assert_eq!(out.tag(), OutcomeTag::Exact);
        }
    }
    assert!(applicable >= 5, "{applicable}");
}

#[test]
fn two_ball_examples() {
    let c5 = Graph::cycle(5);
    assert_eq!(two_ball_reconstruct(&BallCollection::from_graph(&c5, 2), ColourMode::Full).tag(), OutcomeTag::NotApplicable);
    let single = Graph::from_edges(5, [(1, 3)]).unwrap();
    for mode in [ColourMode::Full, ColourMode::Fast] {
        let out = two_ball_reconstruct(&BallCollection::from_graph(&single, 2), mode);
        assert_eq!(out.graph().unwrap().edge_vec(), vec![(1, 3)]);
    }
    assert_eq!(two_ball_reconstruct(&BallCollection::from_graph(&single, 1), ColourMode::Fast).tag(), OutcomeTag::NotApplicable);
}

#[test]
fn two_ball_fast_on_g300() {
    let mut applicable = 0;
    for seed in 0..5 {
        let g = gnp(300, 0.08, seed);
        let out = reconstruct(&BallCollection::from_graph(&g, 2), Algorithm::TwoBall(ColourMode::Fast));
        if !colour_collision(&g, ColourMode::Fast) {
            applicable += 1;
            assert_eq!(out.graph().map(Graph::edge_vec), Some(g.edge_vec()), "seed {seed}");
        }
    }
    assert!(applicable >= 3);
}

#[test]
fn hybrid_all_high_degree_is_overlap() {
    let g = gnp(60, 0.3, 4);
    let p = 0.3;
    assert!((0..60).all(|v| g.degree(v) as f64 >= 60.0 * p / 2.0));
    let bc = BallCollection::from_graph(&g, 4);
    match hybrid_high_low_reconstruct(&bc, Some(p)) {
        Reconstruction::Exact(h) => assert_eq!(h.edge_vec(), g.edge_vec()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn hybrid_low_component_bound() {
    let dense = gnp(60, 0.5, 9);
    // One pendant vertex: a low component of size 1 = r - 3 is allowed.
    let mut edges = dense.edge_vec();
    edges.push((0, 60));
    let one = Graph::from_edges(61, edges.clone()).unwrap();
    let out = reconstruct(&BallCollection::from_graph(&one, 4), Algorithm::Hybrid { p_hint: Some(0.5) });
    assert_eq!(out.tag(), OutcomeTag::Isomorphic, "{out:?}");
    assert_eq!(canonical_code_plain(out.graph().unwrap()).unwrap(), canonical_code_plain(&one).unwrap());
    // Two adjacent low vertices form a component of r - 2 vertices.
    edges.push((60, 61));
    edges.push((1, 61));
    let two = Graph::from_edges(62, edges).unwrap();
    let out = hybrid_high_low_reconstruct(&BallCollection::from_graph(&two, 4), Some(0.5));
    assert_eq!(out.tag(), OutcomeTag::NotApplicable, "{out:?}");
}

#[test]
fn hybrid_on_sparse_random_graph() {
    let (n, r) = (400usize, 5usize);
    let p = 12.0 * (n as f64).ln() / (r as f64 * n as f64);
    let mut applicable = 0;
    for seed in 0..2 {
        let g = gnp(n, p, seed);
        let bc = BallCollection::from_graph(&g, r);
        let out = reconstruct(&bc, Algorithm::Hybrid { p_hint: Some(p) });
        if let Some(h) = out.graph() {
            applicable += 1;
            assert_eq!(ball_multiset(h, r), bc.code_multiset());
            assert_eq!(canonical_code_plain(h).unwrap(), canonical_code_plain(&g).unwrap());
        } else {
            assert_eq!(out.tag(), OutcomeTag::NotApplicable, "{out:?}");
        }
    }
    assert!(applicable >= 1);
}

#[test]
fn hybrid_needs_radius_four() {
    let g = gnp(40, 0.3, 1);
    assert_eq!(hybrid_high_low_reconstruct(&BallCollection::from_graph(&g, 3), Some(0.3)).tag(), OutcomeTag::NotApplicable);
}

#[test]
fn sub_balls_match_direct_extraction() {
    let g = gnp(50, 0.1, 21);
    for v in 0..50 {
        let ball = extract_ball(&g, v, 3).unwrap();
        for &u in g.neighbours(v) {
            let lu = local_index(&ball, u);
            let inner = ball.sub_ball(lu, 2);
            let direct = extract_ball(&g, u, 2).unwrap();
            assert_eq!(shotgun::canon::canonical_code_rooted(&inner), shotgun::canon::canonical_code_rooted(&direct));
        }
    }
}

#[test]
fn algorithm_names() {
    for s in ["assemble", "overlap", "two-ball", "two-ball-full", "hybrid"] {
        assert_eq!(s.parse::<Algorithm>().unwrap().to_string(), s);
    }
    assert_eq!("two-ball-fast".parse::<Algorithm>().unwrap(), Algorithm::TwoBall(ColourMode::Fast));
    assert!("nope".parse::<Algorithm>().is_err());
}
