//! Reconstruction procedures. Each consumes only a [`BallCollection`] and
//! either rebuilds the graph or reports why it cannot.

mod assemble;
mod colour;
mod hybrid;
mod overlap;
mod two_ball;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use assemble::assemble_small_components;
pub use colour::{
    colour_edge_fast, colour_edge_fast_in_ball, colour_edge_full, colour_edge_full_in_ball,
    star_colouring_reconstruct, ColourMode, ColouredStar, EdgeColour, FastSignature,
};
pub use hybrid::hybrid_high_low_reconstruct;
pub use overlap::overlap_reconstruct;
pub use two_ball::two_ball_reconstruct;

use crate::canon::{ball_multiset, canonical_code_rooted, BallFile, CanonicalCode};
use crate::graph::{BallScratch, Graph, RootedBall};

#[derive(Debug, Error)]
pub enum CollectionError {
    #[error("ball {index} has radius {found}, expected {expected}")]
    MixedRadius { index: usize, found: usize, expected: usize },
    #[error("ball {index} is rooted at vertex {centre}")]
    WrongCentre { index: usize, centre: usize },
    #[error("reconstruction needs full ball records, not codes only")]
    CodesOnly,
}

/// The balls `N_r(v)` of a hidden graph, one per vertex, indexed by vertex.
/// Only each ball's root carries an identity.
#[derive(Clone, Debug)]
pub struct BallCollection {
    radius: usize,
    balls: Vec<RootedBall>,
}

impl BallCollection {
    pub fn new(radius: usize, balls: Vec<RootedBall>) -> Result<Self, CollectionError> {
        for (index, b) in balls.iter().enumerate() {
            if b.radius() != radius {
                return Err(CollectionError::MixedRadius { index, found: b.radius(), expected: radius });
            }
            if b.centre() != index {
                return Err(CollectionError::WrongCentre { index, centre: b.centre() });
            }
        }
        let balls = balls.into_iter().map(RootedBall::anonymised).collect();
        Ok(BallCollection { radius, balls })
    }

    /// Extracts every ball of `g` and forgets all labels except the roots.
    pub fn from_graph(g: &Graph, radius: usize) -> Self {
        let mut scratch = BallScratch::new(g.n());
        let balls = (0..g.n())
            .map(|v| scratch.extract(g, v, radius).expect("vertex in range").anonymised())
            .collect();
        BallCollection { radius, balls }
    }

    pub fn from_ball_file(file: BallFile) -> Result<Self, CollectionError> {
        match file {
            BallFile::Full { radius, balls, .. } => BallCollection::new(radius, balls),
            BallFile::Codes { .. } => Err(CollectionError::CodesOnly),
        }
    }

    pub fn n(&self) -> usize {
        self.balls.len()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn balls(&self) -> &[RootedBall] {
        &self.balls
    }

    pub fn ball(&self, v: usize) -> &RootedBall {
        &self.balls[v]
    }

    /// Rooted codes of the balls, sorted.
    pub fn code_multiset(&self) -> Vec<CanonicalCode> {
        use rayon::prelude::*;
        let mut codes: Vec<_> = self.balls.par_iter().map(canonical_code_rooted).collect();
        codes.sort_unstable();
        codes
    }
}

/// Result of a reconstruction attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    /// The labelled hidden graph.
    Exact(Graph),
    /// A graph isomorphic to the hidden one, with arbitrary labels.
    Isomorphic(Graph),
    /// The method's precondition does not hold for this collection.
    NotApplicable(String),
    /// The collection contradicts itself, or the output failed its check.
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeTag {
    Exact,
    Isomorphic,
    NotApplicable,
    Inconsistent,
}

impl OutcomeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeTag::Exact => "EXACT",
            OutcomeTag::Isomorphic => "ISOMORPHIC",
            OutcomeTag::NotApplicable => "NOT_APPLICABLE",
            OutcomeTag::Inconsistent => "INCONSISTENT",
        }
    }
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Reconstruction {
    pub fn tag(&self) -> OutcomeTag {
        match self {
            Reconstruction::Exact(_) => OutcomeTag::Exact,
            Reconstruction::Isomorphic(_) => OutcomeTag::Isomorphic,
            Reconstruction::NotApplicable(_) => OutcomeTag::NotApplicable,
            Reconstruction::Inconsistent(_) => OutcomeTag::Inconsistent,
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            Reconstruction::Exact(g) | Reconstruction::Isomorphic(g) => Some(g),
            _ => None,
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Reconstruction::NotApplicable(s) | Reconstruction::Inconsistent(s) => Some(s),
            _ => None,
        }
    }

    pub(crate) fn not_applicable(msg: impl Into<String>) -> Self {
        Reconstruction::NotApplicable(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Reconstruction::Inconsistent(msg.into())
    }
}

/// Reconstruction procedure selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    Assemble,
    Overlap,
    TwoBall(ColourMode),
    /// High/low degree split; `None` estimates `np` from the mean root degree.
    Hybrid { p_hint: Option<f64> },
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "assemble" => Ok(Algorithm::Assemble),
            "overlap" => Ok(Algorithm::Overlap),
            "two-ball" | "two-ball-fast" => Ok(Algorithm::TwoBall(ColourMode::Fast)),
            "two-ball-full" => Ok(Algorithm::TwoBall(ColourMode::Full)),
            "hybrid" => Ok(Algorithm::Hybrid { p_hint: None }),
            other => Err(format!(
                "unknown algorithm {other:?} (expected assemble, overlap, two-ball, two-ball-full or hybrid)"
            )),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Assemble => "assemble",
            Algorithm::Overlap => "overlap",
            Algorithm::TwoBall(ColourMode::Fast) => "two-ball",
            Algorithm::TwoBall(ColourMode::Full) => "two-ball-full",
            Algorithm::Hybrid { .. } => "hybrid",
        })
    }
}

/// Runs `alg`, then checks that any returned graph has exactly the input's
/// ball multiset; a mismatch is reported as inconsistent.
pub fn reconstruct(bc: &BallCollection, alg: Algorithm) -> Reconstruction {
    let out = match alg {
        Algorithm::Assemble => assemble_small_components(bc),
        Algorithm::Overlap => overlap_reconstruct(bc),
        Algorithm::TwoBall(mode) => two_ball_reconstruct(bc, mode),
        Algorithm::Hybrid { p_hint } => hybrid_high_low_reconstruct(bc, p_hint),
    };
    match out.graph() {
        Some(g) if ball_multiset(g, bc.radius()) != bc.code_multiset() => {
            Reconstruction::inconsistent("output ball multiset differs from the input collection")
        }
        _ => out,
    }
}
