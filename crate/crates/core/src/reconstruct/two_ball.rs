//! Exact reconstruction from 2-balls via edge colours.

use rayon::prelude::*;

use super::colour::{colour_in_ball, star_colouring_reconstruct, ColourMode, ColouredStar};
use super::{BallCollection, Reconstruction};

/// Colours every edge from its endpoints' 2-balls, then rebuilds each colour
/// class as a star or triangle. Not applicable when two disjoint edges share
/// a colour.
pub fn two_ball_reconstruct(bc: &BallCollection, mode: ColourMode) -> Reconstruction {
    if bc.radius() != 2 {
        return Reconstruction::not_applicable(format!(
            "two-ball reconstruction needs radius 2, got {}",
            bc.radius()
        ));
    }
    let stars: Vec<ColouredStar> = bc
        .balls()
        .par_iter()
        .enumerate()
        .map(|(v, ball)| {
            ColouredStar::from_colours(
                v,
                ball.neighbours(0).iter().map(|&w| colour_in_ball(ball, w as usize, mode)),
            )
        })
        .collect();
    star_colouring_reconstruct(bc.n(), &stars)
}
