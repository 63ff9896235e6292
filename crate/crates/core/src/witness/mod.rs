//! Non-reconstructibility witnesses: an edge swap turning `G` into a graph
//! `G'` with the same ball multiset, plus an invariant telling them apart.

mod local;
mod path_pair;
mod three;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use local::{find_r1_witness, find_r2_witness};
pub use path_pair::{count_path_components, find_path_pair_witness};
pub use three::{find_r3_witness, good_edge, h_structure, GoodEdgeWindow};

use crate::canon::{ball_codes_of, canonical_code_plain_with_cap, canonical_code_rooted, CanonicalCode};
use crate::graph::{components, extract_ball, BallScratch, Graph, GraphError};

/// Default number of candidate edge pairs tried by the sampling finders.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("witness does not apply: {0}")]
    Apply(#[from] GraphError),
    #[error("removed and added edge lists differ in length")]
    Unbalanced,
    #[error("witness needs actors {needed}, has {found}")]
    Actors { needed: usize, found: usize },
    #[error("bad witness file: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FinderKind {
    #[serde(rename = "path-pair")]
    PathPair,
    #[serde(rename = "r1")]
    R1,
    #[serde(rename = "r2")]
    R2,
    #[serde(rename = "r3")]
    R3,
}

impl FinderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FinderKind::PathPair => "path-pair",
            FinderKind::R1 => "r1",
            FinderKind::R2 => "r2",
            FinderKind::R3 => "r3",
        }
    }
}

impl fmt::Display for FinderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FinderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path-pair" => Ok(FinderKind::PathPair),
            "r1" => Ok(FinderKind::R1),
            "r2" => Ok(FinderKind::R2),
            "r3" => Ok(FinderKind::R3),
            other => Err(format!("unknown finder {other:?} (expected path-pair, r1, r2 or r3)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    /// Histogram of component sizes, flattened as `size, count` pairs.
    ComponentMultiset,
    /// `[d(x), d(y), #edges between the degree-d(x) and degree-d(y) classes]`.
    DegreeClassEdge,
    /// As above with `|Γ2|` in place of the degree.
    Ball2ClassEdge,
    /// `[#edges between the 3-ball classes of u and v in G]`.
    Ball3ClassEdge,
    /// Whole-graph canonical code, four bytes per word.
    ExactIsoCheck,
}

/// An invariant evaluated on both graphs. It certifies non-isomorphism when
/// the two payloads differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonIsoCertificate {
    pub kind: CertificateKind,
    pub g: Vec<u64>,
    pub g_prime: Vec<u64>,
}

impl NonIsoCertificate {
    pub fn differs(&self) -> bool {
        self.g != self.g_prime
    }
}

/// An edge swap with its certificate. Actors are `[u, v, x, y]` for the
/// local swaps and the two path ends `[a_2r, b_0]` for path pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapWitness {
    pub finder: FinderKind,
    pub radius: usize,
    pub removed: Vec<(usize, usize)>,
    pub added: Vec<(usize, usize)>,
    pub actors: Vec<usize>,
    pub certificate: NonIsoCertificate,
}

impl SwapWitness {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("witness serialises")
    }

    pub fn from_toml(s: &str) -> Result<Self, WitnessError> {
        toml::from_str(s).map_err(|e| WitnessError::Format(e.to_string()))
    }

    /// Every vertex touched by the swap.
    pub fn endpoints(&self) -> Vec<usize> {
        let mut e: Vec<usize> =
            self.removed.iter().chain(&self.added).flat_map(|&(a, b)| [a, b]).collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// `G'`: `g` with the witness's removed edges deleted and added edges inserted.
pub fn apply_swap(g: &Graph, w: &SwapWitness) -> Result<Graph, WitnessError> {
    if w.removed.len() != w.added.len() {
        return Err(WitnessError::Unbalanced);
    }
    for &(a, b) in &w.added {
        if g.has_edge(a, b) && !w.removed.iter().any(|&(c, d)| (c, d) == (a, b) || (d, c) == (a, b)) {
            return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)).into());
        }
    }
    Ok(g.with_edits(&w.removed, &w.added)?)
}

fn component_histogram(g: &Graph) -> Vec<u64> {
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    for c in components(g) {
        *hist.entry(c.len()).or_insert(0) += 1;
    }
    hist.into_iter().flat_map(|(s, m)| [s as u64, m]).collect()
}

/// `|Γ2(v)|` for every vertex.
pub fn second_neighbourhood_sizes(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let mut mark = vec![usize::MAX; n];
    (0..n)
        .map(|v| {
            mark[v] = v;
            for &a in g.neighbours(v) {
                mark[a] = v;
            }
            let mut count = 0;
            for &a in g.neighbours(v) {
                for &b in g.neighbours(a) {
                    if mark[b] != v {
                        mark[b] = v;
                        count += 1;
                    }
                }
            }
            count
        })
        .collect()
}

fn class_edge_count(g: &Graph, label: &[u64], a: u64, b: u64) -> u64 {
    g.edges()
        .filter(|&(i, j)| {
            let (li, lj) = (label[i], label[j]);
            (li == a && lj == b) || (li == b && lj == a)
        })
        .count() as u64
}

/// Number of edges of `g` joining a vertex whose 3-ball code is `a` to one
/// whose code is `b`. Codes are only computed for vertices whose degree and
/// 3-ball size match one of the targets.
pub(crate) fn ball3_class_edge_count(g: &Graph, a: &CanonicalCode, b: &CanonicalCode, shapes: [(usize, usize); 2]) -> u64 {
    let mut scratch = BallScratch::new(g.n());
    let mut class: Vec<u8> = vec![0; g.n()];
    for v in 0..g.n() {
        if !shapes.iter().any(|&(d, _)| d == g.degree(v)) {
            continue;
        }
        let ball = scratch.extract(g, v, 3).expect("vertex in range");
        if !shapes.contains(&(g.degree(v), ball.len())) {
            continue;
        }
        let code = canonical_code_rooted(&ball);
        class[v] = (code == *a) as u8 | (((code == *b) as u8) << 1);
    }
    g.edges()
        .filter(|&(i, j)| {
            let (ci, cj) = (class[i], class[j]);
            (ci & 1 != 0 && cj & 2 != 0) || (ci & 2 != 0 && cj & 1 != 0)
        })
        .count() as u64
}

fn actor(actors: &[usize], i: usize) -> Result<usize, WitnessError> {
    actors.get(i).copied().ok_or(WitnessError::Actors { needed: 4, found: actors.len() })
}

/// Evaluates a certificate's invariant on `(g, g_prime)`. Class parameters
/// (degrees, ball sizes, 3-ball codes) are taken from the actors in `g`.
pub fn evaluate_certificate(
    kind: CertificateKind,
    g: &Graph,
    g_prime: &Graph,
    actors: &[usize],
) -> Result<NonIsoCertificate, WitnessError> {
    for &a in actors {
        g.check_vertex(a)?;
    }
    let (pg, pp) = match kind {
        CertificateKind::ComponentMultiset => (component_histogram(g), component_histogram(g_prime)),
        CertificateKind::DegreeClassEdge => {
            let (x, y) = (actor(actors, 2)?, actor(actors, 3)?);
            let (dx, dy) = (g.degree(x) as u64, g.degree(y) as u64);
            let eval = |h: &Graph| {
                let deg: Vec<u64> = (0..h.n()).map(|v| h.degree(v) as u64).collect();
                vec![dx, dy, class_edge_count(h, &deg, dx, dy)]
            };
            (eval(g), eval(g_prime))
        }
        CertificateKind::Ball2ClassEdge => {
            let (x, y) = (actor(actors, 2)?, actor(actors, 3)?);
            let sizes = second_neighbourhood_sizes(g);
            let (sx, sy) = (sizes[x], sizes[y]);
            let sizes_p = second_neighbourhood_sizes(g_prime);
            (
                vec![sx, sy, class_edge_count(g, &sizes, sx, sy)],
                vec![sx, sy, class_edge_count(g_prime, &sizes_p, sx, sy)],
            )
        }
        CertificateKind::Ball3ClassEdge => {
            let (u, v) = (actor(actors, 0)?, actor(actors, 1)?);
            let bu = extract_ball(g, u, 3)?;
            let bv = extract_ball(g, v, 3)?;
            let shapes = [(g.degree(u), bu.len()), (g.degree(v), bv.len())];
            let (a, b) = (canonical_code_rooted(&bu), canonical_code_rooted(&bv));
            (
                vec![ball3_class_edge_count(g, &a, &b, shapes)],
                vec![ball3_class_edge_count(g_prime, &a, &b, shapes)],
            )
        }
        CertificateKind::ExactIsoCheck => {
            let pack = |h: &Graph| -> Result<Vec<u64>, WitnessError> {
                let code = canonical_code_plain_with_cap(h, usize::MAX).expect("no cap");
                let bytes = code.as_bytes();
                let mut out = vec![bytes.len() as u64];
                out.extend(bytes.chunks(4).map(|c| {
                    let mut w = [0u8; 4];
                    w[..c.len()].copy_from_slice(c);
                    u32::from_le_bytes(w) as u64
                }));
                Ok(out)
            };
            (pack(g)?, pack(g_prime)?)
        }
    };
    Ok(NonIsoCertificate { kind, g: pg, g_prime: pp })
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Run a whole-graph isomorphism test when `n` is at most this.
    pub exact_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { exact_cap: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// Set when the swap could not be applied; everything else is then false.
    pub apply_error: Option<String>,
    /// Vertices whose balls were compared (those within `r` of a swapped endpoint).
    pub affected: usize,
    pub balls_equal: bool,
    /// The recomputed certificate.
    pub certificate: Option<NonIsoCertificate>,
    pub certificate_differs: bool,
    /// The recomputed payloads equal the ones stored in the witness.
    pub certificate_matches: bool,
    /// `Some(true)` if the exact test found the graphs isomorphic.
    pub exact_isomorphic: Option<bool>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.apply_error.is_none()
            && self.balls_equal
            && self.certificate_differs
            && self.certificate_matches
            && self.exact_isomorphic != Some(true)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(e) = &self.apply_error {
            writeln!(f, "swap: FAILED ({e})")?;
        }
        writeln!(f, "balls: {} ({} affected vertices compared)", if self.balls_equal { "EQUAL" } else { "DIFFER" }, self.affected)?;
        if let Some(c) = &self.certificate {
            writeln!(f, "certificate: {:?} g={:?} g'={:?}", c.kind, c.g, c.g_prime)?;
        }
        writeln!(f, "certificate: {}", if self.certificate_differs { "DIFFERS" } else { "FAILS" })?;
        writeln!(f, "certificate payload: {}", if self.certificate_matches { "MATCHES" } else { "MISMATCH" })?;
        match self.exact_isomorphic {
            Some(true) => writeln!(f, "exact: ISOMORPHIC")?,
            Some(false) => writeln!(f, "exact: NOT ISOMORPHIC")?,
            None => writeln!(f, "exact: SKIPPED")?,
        }
        write!(f, "verdict: {}", if self.is_valid() { "VALID" } else { "INVALID" })
    }
}

/// Balls of vertices farther than `r` from every swapped endpoint are the
/// same in both graphs, and that set of vertices is the same in both, so
/// comparing the balls of the remaining vertices decides multiset equality.
pub fn balls_preserved(g: &Graph, g_prime: &Graph, endpoints: &[usize], r: usize) -> (bool, usize) {
    let affected = g.within(endpoints, r);
    let mut a = ball_codes_of(g, &affected, r);
    let mut b = ball_codes_of(g_prime, &affected, r);
    a.sort_unstable();
    b.sort_unstable();
    (a == b, affected.len())
}

/// Checks a witness against `g`: ball multisets at the witness radius must be
/// equal and the certificate must differ between the graphs.
pub fn verify_witness(g: &Graph, w: &SwapWitness, opts: VerifyOptions) -> VerificationReport {
    let mut report = VerificationReport {
        apply_error: None,
        affected: 0,
        balls_equal: false,
        certificate: None,
        certificate_differs: false,
        certificate_matches: false,
        exact_isomorphic: None,
    };
    let g_prime = match apply_swap(g, w) {
        Ok(h) => h,
        Err(e) => {
            report.apply_error = Some(e.to_string());
            return report;
        }
    };
    let (equal, affected) = balls_preserved(g, &g_prime, &w.endpoints(), w.radius);
    report.balls_equal = equal;
    report.affected = affected;
    match evaluate_certificate(w.certificate.kind, g, &g_prime, &w.actors) {
        Ok(c) => {
            report.certificate_differs = c.differs();
            report.certificate_matches = c == w.certificate;
            report.certificate = Some(c);
        }
        Err(e) => report.apply_error = Some(e.to_string()),
    }
    if g.n() <= opts.exact_cap {
        let a = canonical_code_plain_with_cap(g, opts.exact_cap).expect("within cap");
        let b = canonical_code_plain_with_cap(&g_prime, opts.exact_cap).expect("within cap");
        report.exact_isomorphic = Some(a == b);
    }
    report
}

/// Options shared by the finders.
#[derive(Clone, Copy, Debug)]
pub struct FinderOptions {
    /// Candidate edge pairs tried by the sampling finders.
    pub budget: u64,
    /// Seed of the candidate sampler.
    pub seed: u64,
    /// Edge probability for the degree windows; estimated from the mean
    /// degree when absent.
    pub p: Option<f64>,
    /// Representatives kept per `H_uv` class by the radius-3 finder.
    pub bucket_size: usize,
}

impl Default for FinderOptions {
    fn default() -> Self {
        FinderOptions { budget: DEFAULT_BUDGET, seed: 0, p: None, bucket_size: 8 }
    }
}

impl FinderOptions {
    pub(crate) fn p_or_estimate(&self, g: &Graph) -> f64 {
        self.p.unwrap_or_else(|| {
            if g.n() < 2 {
                0.0
            } else {
                2.0 * g.edge_count() as f64 / (g.n() as f64 * (g.n() - 1) as f64)
            }
        })
    }
}

/// What a finder did, whether or not it found a witness.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FinderStats {
    /// Candidates examined.
    pub candidates: u64,
    /// Candidates meeting the finder's conditions whose swap then failed
    /// verification.
    pub rejected: u64,
    pub path_components: Option<usize>,
    pub good_edges: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct FinderResult {
    pub witness: Option<SwapWitness>,
    pub stats: FinderStats,
}

/// Runs the named finder with radius `r` (ignored by the fixed-radius ones).
pub fn find_witness(g: &Graph, kind: FinderKind, r: usize, opts: &FinderOptions) -> FinderResult {
    match kind {
        FinderKind::PathPair => find_path_pair_witness(g, r),
        FinderKind::R1 => find_r1_witness(g, opts),
        FinderKind::R2 => find_r2_witness(g, opts),
        FinderKind::R3 => find_r3_witness(g, opts),
    }
}

/// Builds a witness for the swap and keeps it only if it verifies.
pub(crate) fn certified(
    g: &Graph,
    finder: FinderKind,
    radius: usize,
    removed: Vec<(usize, usize)>,
    added: Vec<(usize, usize)>,
    actors: Vec<usize>,
    kind: CertificateKind,
) -> Option<SwapWitness> {
    let norm = |e: Vec<(usize, usize)>| e.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    let mut w = SwapWitness {
        finder,
        radius,
        removed: norm(removed),
        added: norm(added),
        actors,
        certificate: NonIsoCertificate { kind, g: Vec::new(), g_prime: Vec::new() },
    };
    let g_prime = apply_swap(g, &w).ok()?;
    w.certificate = evaluate_certificate(kind, g, &g_prime, &w.actors).ok()?;
    if !w.certificate.differs() {
        return None;
    }
    let (equal, _) = balls_preserved(g, &g_prime, &w.endpoints(), radius);
    equal.then_some(w)
}
