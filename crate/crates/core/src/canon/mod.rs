//! Canonical codes for rooted balls, edge-rooted structures and whole graphs,
//! and the ball-collection statistics built on them.

mod ballfile;
mod label;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

pub use ballfile::{read_ball_file, write_ball_codes, write_ball_collection, BallFile, BallFileError};

use crate::graph::{BallScratch, Graph, GraphError, RootedBall};

/// Default vertex cap for whole-graph canonical codes.
pub const DEFAULT_PLAIN_CAP: usize = 512;

#[derive(Debug, Error)]
pub enum CanonError {
    #[error("graph has {n} vertices, above the plain-code cap of {cap}")]
    ExceedsCap { n: usize, cap: usize },
    #[error("distinguished pair {0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("malformed canonical code")]
    Malformed,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What a code was computed for; part of the encoding so codes of different
/// kinds never collide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum CodeKind {
    Plain = b'P',
    Rooted = b'R',
    EdgeRooted = b'E',
    OrderedEdge = b'O',
    Coloured = b'C',
}

/// Relabelling-invariant identifier of a (rooted / edge-rooted / coloured)
/// graph up to isomorphism.
///
/// Layout: kind byte, vertex count `k` (u32 LE), number of colour runs, then
/// `(colour, run length)` pairs in canonical order (u32 LE each), then the
/// upper triangle of the canonical adjacency matrix packed row-major, LSB
/// first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CanonicalCode(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CanonError> {
        hex::decode(s).map(CanonicalCode).map_err(|_| CanonError::Malformed)
    }

    /// Number of vertices of the encoded structure.
    pub fn vertex_count(&self) -> usize {
        u32::from_le_bytes(self.0[1..5].try_into().expect("code has a header")) as usize
    }

    /// Decodes the canonical representative: per-position colours and edges.
    pub fn decode(&self) -> Result<(Vec<u32>, Vec<(usize, usize)>), CanonError> {
        let b = &self.0;
        let word = |i: usize| -> Result<u32, CanonError> {
            b.get(i..i + 4)
                .map(|s| u32::from_le_bytes(s.try_into().unwrap()))
                .ok_or(CanonError::Malformed)
        };
        let k = word(1)? as usize;
        let runs = word(5)? as usize;
        let mut colours = Vec::with_capacity(k);
        let mut at = 9;
        for _ in 0..runs {
            let c = word(at)?;
            let l = word(at + 4)? as usize;
            colours.extend(std::iter::repeat(c).take(l));
            at += 8;
        }
        if colours.len() != k {
            return Err(CanonError::Malformed);
        }
        let bits = &b[at..];
        let mut edges = Vec::new();
        let mut idx = 0usize;
        for i in 0..k {
            for j in i + 1..k {
                let byte = bits.get(idx / 8).ok_or(CanonError::Malformed)?;
                if byte >> (idx % 8) & 1 == 1 {
                    edges.push((i, j));
                }
                idx += 1;
            }
        }
        Ok((colours, edges))
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.to_hex();
        if h.len() > 48 {
            write!(f, "CanonicalCode({}..{} bytes)", &h[..48], self.0.len())
        } else {
            write!(f, "CanonicalCode({h})")
        }
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Canonical code of an adjacency structure with vertex colours.
pub(crate) fn code_of(kind: CodeKind, adj: &[Vec<u32>], colours: &[u32]) -> CanonicalCode {
    let k = adj.len();
    let (order, edges) = label::canonical_labelling(adj, colours);
    let mut out = Vec::with_capacity(9 + k * k / 16 + 16);
    out.push(kind as u8);
    out.extend_from_slice(&(k as u32).to_le_bytes());
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &v in &order {
        let c = colours[v as usize];
        match runs.last_mut() {
            Some((rc, l)) if *rc == c => *l += 1,
            _ => runs.push((c, 1)),
        }
    }
    out.extend_from_slice(&(runs.len() as u32).to_le_bytes());
    for (c, l) in runs {
        out.extend_from_slice(&c.to_le_bytes());
        out.extend_from_slice(&l.to_le_bytes());
    }
    let nbits = k * k.saturating_sub(1) / 2;
    let mut bits = vec![0u8; nbits.div_ceil(8)];
    for (a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        // index of (a, b) in the row-major upper triangle
        let idx = a * (2 * k - a - 1) / 2 + (b - a - 1);
        bits[idx / 8] |= 1 << (idx % 8);
    }
    out.extend_from_slice(&bits);
    CanonicalCode(out)
}

fn graph_adjacency(g: &Graph) -> Vec<Vec<u32>> {
    (0..g.n()).map(|v| g.neighbours(v).iter().map(|&w| w as u32).collect()).collect()
}

/// Code of a ball up to root-preserving isomorphism.
pub fn canonical_code_rooted(ball: &RootedBall) -> CanonicalCode {
    let mut colours = vec![1u32; ball.len()];
    colours[0] = 0;
    code_of(CodeKind::Rooted, ball.adjacency(), &colours)
}

/// A graph with one distinguished edge `{u, v}`.
#[derive(Clone, Debug)]
pub struct EdgeRootedGraph {
    adj: Vec<Vec<u32>>,
    u: usize,
    v: usize,
}

/// Codes of an edge-rooted graph: `unordered` treats the distinguished edge
/// as a set; `forward` additionally pins `u` (and `backward` pins `v`) as the
/// first endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRootedCodes {
    pub unordered: CanonicalCode,
    pub forward: CanonicalCode,
    pub backward: CanonicalCode,
}

impl EdgeRootedGraph {
    pub fn new(g: &Graph, u: usize, v: usize) -> Result<Self, CanonError> {
        if !g.has_edge(u, v) {
            return Err(CanonError::NotAnEdge(u, v));
        }
        Ok(EdgeRootedGraph { adj: graph_adjacency(g), u, v })
    }

    pub(crate) fn from_adjacency(adj: Vec<Vec<u32>>, u: usize, v: usize) -> Result<Self, CanonError> {
        if u >= adj.len() || adj[u].binary_search(&(v as u32)).is_err() {
            return Err(CanonError::NotAnEdge(u, v));
        }
        Ok(EdgeRootedGraph { adj, u, v })
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn unordered_code(&self) -> CanonicalCode {
        let mut colours = vec![1u32; self.adj.len()];
        colours[self.u] = 0;
        colours[self.v] = 0;
        code_of(CodeKind::EdgeRooted, &self.adj, &colours)
    }

    /// Code with `first` pinned as the leading endpoint.
    pub fn ordered_code(&self, first: usize) -> CanonicalCode {
        let second = if first == self.u { self.v } else { self.u };
        let mut colours = vec![2u32; self.adj.len()];
        colours[first] = 0;
        colours[second] = 1;
        code_of(CodeKind::OrderedEdge, &self.adj, &colours)
    }
}

/// All three codes of an edge-rooted graph.
pub fn canonical_code_edge_rooted(s: &EdgeRootedGraph) -> EdgeRootedCodes {
    EdgeRootedCodes {
        unordered: s.unordered_code(),
        forward: s.ordered_code(s.u),
        backward: s.ordered_code(s.v),
    }
}

/// Whole-graph code, refused above [`DEFAULT_PLAIN_CAP`] vertices.
pub fn canonical_code_plain(g: &Graph) -> Result<CanonicalCode, CanonError> {
    canonical_code_plain_with_cap(g, DEFAULT_PLAIN_CAP)
}

pub fn canonical_code_plain_with_cap(g: &Graph, cap: usize) -> Result<CanonicalCode, CanonError> {
    if g.n() > cap {
        return Err(CanonError::ExceedsCap { n: g.n(), cap });
    }
    Ok(code_of(CodeKind::Plain, &graph_adjacency(g), &vec![0; g.n()]))
}

/// Code of a graph whose vertices carry arbitrary colours.
pub fn canonical_code_coloured(g: &Graph, colours: &[u32]) -> CanonicalCode {
    code_of(CodeKind::Coloured, &graph_adjacency(g), colours)
}

/// Rooted code of every ball of radius `r`, indexed by vertex.
pub fn ball_codes(g: &Graph, r: usize) -> Vec<CanonicalCode> {
    (0..g.n())
        .into_par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |scratch, v| canonical_code_rooted(&scratch.extract(g, v, r).expect("vertex in range")),
        )
        .collect()
}

/// Rooted codes of the balls around the given vertices.
pub fn ball_codes_of(g: &Graph, vertices: &[usize], r: usize) -> Vec<CanonicalCode> {
    vertices
        .par_iter()
        .map_init(
            || BallScratch::new(g.n()),
            |scratch, &v| canonical_code_rooted(&scratch.extract(g, v, r).expect("vertex in range")),
        )
        .collect()
}

/// Histogram of ball codes; the flag is true iff every code occurs once.
pub fn balls_unique(g: &Graph, r: usize) -> (bool, BTreeMap<CanonicalCode, usize>) {
    let mut hist = BTreeMap::new();
    for c in ball_codes(g, r) {
        *hist.entry(c).or_insert(0) += 1;
    }
    let unique = hist.values().all(|&m| m == 1);
    (unique, hist)
}

/// The sorted multiset of rooted ball codes. Two graphs have isomorphic
/// `r`-neighbourhoods exactly when these are equal.
pub fn ball_multiset(g: &Graph, r: usize) -> Vec<CanonicalCode> {
    let mut codes = ball_codes(g, r);
    codes.sort_unstable();
    codes
}

/// `D(v)`: sorted degrees of the neighbours of `v`.
pub fn degree_profile(g: &Graph, v: usize) -> Result<Vec<usize>, GraphError> {
    g.check_vertex(v)?;
    let mut d: Vec<usize> = g.neighbours(v).iter().map(|&w| g.degree(w)).collect();
    d.sort_unstable();
    Ok(d)
}

/// True iff the neighbour-degree multisets `D(v)` are pairwise distinct.
pub fn degree_profiles_unique(g: &Graph) -> bool {
    let mut profiles: Vec<Vec<usize>> =
        (0..g.n()).map(|v| degree_profile(g, v).expect("vertex in range")).collect();
    profiles.sort_unstable();
    profiles.windows(2).all(|w| w[0] != w[1])
}
