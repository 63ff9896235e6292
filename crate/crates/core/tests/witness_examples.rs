mod common;

use common::{bfs_within, census_path_components, coin_gnp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shotgun::canon::ball_multiset;
use shotgun::graph::{sample_gnp, GnpParams, Graph};
use shotgun::witness::{
    apply_swap, count_path_components, find_path_pair_witness, find_r1_witness, find_r2_witness, find_r3_witness,
    find_witness, good_edge, verify_witness, CertificateKind, FinderKind, FinderOptions, NonIsoCertificate,
    SwapWitness, VerifyOptions,
};

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    sample_gnp(GnpParams::new(n, p, seed).unwrap())
}

/// Full-multiset oracle plus certificate check, independent of the
/// localized comparison inside `verify_witness`.
fn assert_witness_sound(g: &Graph, w: &SwapWitness) {
    let h = apply_swap(g, w).unwrap();
    assert_eq!(h.n(), g.n());
    assert_eq!(h.edge_count(), g.edge_count());
    assert_eq!(ball_multiset(g, w.radius), ball_multiset(&h, w.radius));
    let report = verify_witness(g, w, VerifyOptions::default());
    assert!(report.is_valid(), "{report}");
}

#[test]
fn path_pair_on_two_p3() {
    let g = Graph::path(3).disjoint_union(&Graph::path(3));
    let w = find_path_pair_witness(&g, 1).witness.expect("witness");
    assert_eq!(w.certificate.kind, CertificateKind::ComponentMultiset);
    let report = verify_witness(&g, &w, VerifyOptions { exact_cap: 64 });
    assert!(report.balls_equal && report.certificate_differs && report.is_valid());
    let text = report.to_string();
    assert!(text.contains("balls: EQUAL") && text.contains("certificate: DIFFERS"));
    let h = apply_swap(&g, &w).unwrap();
    let mut sizes: Vec<usize> = common::uf_component_sizes(&h);
    sizes.sort();
    assert_eq!(sizes, vec![2, 4]);
    assert!(find_path_pair_witness(&Graph::complete(3).disjoint_union(&Graph::complete(3)), 1).witness.is_none());
}

#[test]
fn path_pair_none_iff_census_below_two() {
    for seed in 0..60 {
        let n = 120;
        let p = 1.0 / n as f64 * (0.5 + (seed % 4) as f64 * 0.4);
        let g = gnp(n, p, seed);
        for r in 1..=3 {
            let census = census_path_components(&g, 2 * r + 1);
            assert_eq!(count_path_components(&g, r), census);
            let res = find_path_pair_witness(&g, r);
            assert_eq!(res.witness.is_some(), census >= 2, "seed {seed} r {r}");
            if let Some(w) = res.witness {
                assert_witness_sound(&g, &w);
            }
        }
    }
}

#[test]
fn path_pair_frequency_matches_census() {
    let (n, r, trials) = (2000usize, 2usize, 200u64);
    let p = 1.0 / n as f64;
    let found = (0..trials).filter(|&s| find_path_pair_witness(&gnp(n, p, s), r).witness.is_some()).count();
    let census = (0..trials).filter(|&s| census_path_components(&coin_gnp(n, p, 50_000 + s), 2 * r + 1) >= 2).count();
    let (a, b) = (found as f64 / trials as f64, census as f64 / trials as f64);
    assert!((a - b).abs() <= 0.1, "finder {a} census {b}");
}

#[test]
fn r1_none_on_complete_graph() {
    let opts = FinderOptions { seed: 1, budget: 5000, ..Default::default() };
    assert!(find_r1_witness(&Graph::complete(6), &opts).witness.is_none());
}

#[test]
fn r1_witnesses_verify_on_g5000() {
    let mut found = 0;
    for seed in 0..3 {
        let g = gnp(5000, 0.005, seed);
        let opts = FinderOptions { seed: 100 + seed, p: Some(0.005), ..Default::default() };
        if let Some(w) = find_r1_witness(&g, &opts).witness {
            found += 1;
            assert_eq!(w.certificate.kind, CertificateKind::DegreeClassEdge);
            assert_witness_sound(&g, &w);
        }
    }
    assert!(found > 0);
}

#[test]
fn r2_none_when_every_edge_is_on_a_triangle() {
    // Disjoint triangles and K4s: every edge lies on a triangle.
    let mut g = Graph::complete(3);
    for i in 0..20 {
        g = g.disjoint_union(&if i % 2 == 0 { Graph::complete(4) } else { Graph::complete(3) });
    }
    let opts = FinderOptions { seed: 5, budget: 20_000, ..Default::default() };
    assert!(find_r2_witness(&g, &opts).witness.is_none());
}

#[test]
fn r2_witnesses_verify_on_g4000() {
    let n = 4000usize;
    let p = (n as f64).powf(-0.85);
    for seed in 0..3 {
        let g = gnp(n, p, seed);
        let opts = FinderOptions { seed: 7 + seed, p: Some(p), ..Default::default() };
        if let Some(w) = find_r2_witness(&g, &opts).witness {
            assert_eq!(w.certificate.kind, CertificateKind::Ball2ClassEdge);
            assert_witness_sound(&g, &w);
        }
    }
}

/// Good-edge oracle: the union of the 5-balls of `u` and `v` induces a tree
/// and degrees near `u`, `v` lie in the window.
fn good_edge_oracle(g: &Graph, u: usize, v: usize, p: f64) -> bool {
    let mut s = bfs_within(g, u, 5);
    s.extend(bfs_within(g, v, 5));
    s.sort();
    s.dedup();
    let induced = s.iter().map(|&a| g.neighbours(a).iter().filter(|b| s.binary_search(b).is_ok()).count()).sum::<usize>() / 2;
    if induced + 1 != s.len() {
        return false;
    }
    let n = g.n() as f64;
    let np = n * p;
    let width = 10.0 * (np * np.ln()).max(0.0).sqrt();
    let mut near = bfs_within(g, u, 2);
    near.extend(bfs_within(g, v, 2));
    near.iter().all(|&z| (g.degree(z) as f64 - (n - 1.0) * p).abs() < width)
}

#[test]
fn good_edge_matches_oracle() {
    let n = 3000usize;
    let ln = (n as f64).ln();
    let p = ln * ln / (n as f64 * ln.ln().powi(3));
    let g = gnp(n, p, 17);
    let edges = g.edge_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut good = 0;
    for _ in 0..100 {
        let (u, v) = edges[rng.random_range(0..edges.len())];
        let want = good_edge_oracle(&g, u, v, p);
        assert_eq!(good_edge(&g, u, v, p).unwrap(), want, "edge {u}-{v}");
        good += usize::from(want);
    }
    // At this density 5-balls are large and almost never trees.
    assert!(good < 100, "{good}");

    // A sparser graph where both answers occur.
    let q = 1.5 / n as f64;
    let h = gnp(n, q, 18);
    let (mut yes, mut no) = (0, 0);
    for (u, v) in h.edges() {
        let want = good_edge_oracle(&h, u, v, q);
        assert_eq!(good_edge(&h, u, v, q).unwrap(), want, "edge {u}-{v}");
        if want { yes += 1 } else { no += 1 }
    }
    assert!(yes > 0 && no > 0, "{yes} {no}");
    let non_edge = (0..n).find(|&x| x != 0 && !h.has_edge(0, x)).unwrap();
    assert!(good_edge(&h, 0, non_edge, q).is_err());
}

#[test]
fn good_edge_small_examples() {
    let g = Graph::from_edges(10, [(0, 1)]).unwrap();
    assert!(good_edge(&g, 0, 1, 0.9).unwrap());
    let t = Graph::complete(3).disjoint_union(&Graph::empty(5));
    assert!(!good_edge(&t, 0, 1, 0.5).unwrap());
    // Closing a cycle inside the 5-balls turns a good edge bad.
    let path = Graph::path(8).disjoint_union(&Graph::empty(20));
    assert!(good_edge(&path, 3, 4, 0.1).unwrap());
    let mut e = path.edge_vec();
    e.push((0, 7));
    let cyc = Graph::from_edges(28, e).unwrap();
    assert!(!good_edge(&cyc, 3, 4, 0.1).unwrap());
}

/// A 40-cycle with pendant leaves that break its symmetry.
fn decorated_cycle() -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..40).map(|i| (i.min((i + 1) % 40), i.max((i + 1) % 40))).collect();
    let mut next = 40;
    for (at, leaves) in [(0, 1), (20, 1), (1, 2), (21, 2), (38, 3), (3, 3)] {
        for _ in 0..leaves {
            edges.push((at, next));
            next += 1;
        }
    }
    Graph::from_edges(next, edges).unwrap()
}

/// BFS distance avoiding the edge `ab`.
fn distance_without(g: &Graph, a: usize, b: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[a] = 0;
    let mut q = std::collections::VecDeque::from([a]);
    while let Some(x) = q.pop_front() {
        for &y in g.neighbours(x) {
            if (x == a && y == b) || dist[y] != usize::MAX {
                continue;
            }
            dist[y] = dist[x] + 1;
            q.push_back(y);
        }
    }
    (dist[b] != usize::MAX).then_some(dist[b])
}

#[test]
fn r3_on_decorated_cycle() {
    let g = decorated_cycle();
    let opts = FinderOptions { p: Some(3.0 / g.n() as f64), ..Default::default() };
    let w = find_r3_witness(&g, &opts).witness.expect("witness");
    assert_eq!(w.certificate.kind, CertificateKind::Ball3ClassEdge);
    assert_witness_sound(&g, &w);
    let h = apply_swap(&g, &w).unwrap();
    for &(a, b) in &w.added {
        if let Some(d) = distance_without(&h, a, b) {
            assert!(d >= 7, "new edge {a}-{b} closes a cycle of length {}", d + 1);
        }
    }
    assert!(verify_witness(&g, &w, VerifyOptions { exact_cap: 128 }).exact_isomorphic == Some(false));
}

#[test]
fn r3_none_on_small_tree() {
    let g = Graph::from_edges(10, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7), (7, 8), (3, 9)]).unwrap();
    assert!(find_r3_witness(&g, &FinderOptions { p: Some(0.3), ..Default::default() }).witness.is_none());
}

#[test]
fn r3_random_witnesses_verify() {
    let n = 3000usize;
    let ln = (n as f64).ln();
    let p = ln * ln / (n as f64 * ln.ln().powi(3));
    for seed in 0..2 {
        let g = gnp(n, p, seed);
        let res = find_r3_witness(&g, &FinderOptions { p: Some(p), ..Default::default() });
        assert!(res.stats.good_edges.is_some());
        if let Some(w) = res.witness {
            assert_witness_sound(&g, &w);
        }
    }
}

#[test]
fn apply_swap_examples() {
    let p3 = Graph::path(3);
    let w = SwapWitness {
        finder: FinderKind::PathPair,
        radius: 1,
        removed: vec![(0, 1)],
        added: vec![(0, 2)],
        actors: vec![],
        certificate: NonIsoCertificate { kind: CertificateKind::ComponentMultiset, g: vec![], g_prime: vec![] },
    };
    let h = apply_swap(&p3, &w).unwrap();
    assert_eq!(h.edge_vec(), vec![(0, 2), (1, 2)]);
    let inverse = SwapWitness { removed: w.added.clone(), added: w.removed.clone(), ..w.clone() };
    assert_eq!(apply_swap(&h, &inverse).unwrap().edge_vec(), p3.edge_vec());

    let empty = SwapWitness { removed: vec![], added: vec![], ..w.clone() };
    assert_eq!(apply_swap(&p3, &empty).unwrap(), p3);
    let report = verify_witness(&p3, &empty, VerifyOptions::default());
    assert!(report.balls_equal && !report.certificate_differs && !report.is_valid());

    let missing = SwapWitness { removed: vec![(0, 2)], added: vec![(0, 1)], ..w.clone() };
    assert!(apply_swap(&p3, &missing).is_err());
    assert!(!verify_witness(&p3, &missing, VerifyOptions::default()).is_valid());
}

#[test]
fn tampered_witness_fails() {
    let g = Graph::path(5).disjoint_union(&Graph::path(5));
    let mut w = find_path_pair_witness(&g, 2).witness.unwrap();
    assert!(verify_witness(&g, &w, VerifyOptions::default()).is_valid());
    w.radius = 3;
    assert!(!verify_witness(&g, &w, VerifyOptions::default()).is_valid());
    w.radius = 2;
    w.certificate.g_prime[0] += 1;
    assert!(!verify_witness(&g, &w, VerifyOptions::default()).is_valid());
}

#[test]
fn witness_toml_round_trip() {
    let g = Graph::path(3).disjoint_union(&Graph::path(3));
    let w = find_path_pair_witness(&g, 1).witness.unwrap();
    let back = SwapWitness::from_toml(&w.to_toml()).unwrap();
    assert_eq!(back, w);
    assert!(SwapWitness::from_toml("radius = 1").is_err());
}

#[test]
fn finders_ignore_thread_count() {
    let g = gnp(2000, 0.01, 4);
    let opts = FinderOptions { seed: 9, p: Some(0.01), ..Default::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| find_witness(&g, FinderKind::R1, 1, &opts).witness)
    };
    let one = run(1);
    assert!(one.is_some());
    assert_eq!(one, run(4));
}
