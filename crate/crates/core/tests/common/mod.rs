//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tomtree::levy::{kill_at_zero, sample_path, simulate_splitting_tree, JumpLaw, LevyParams, SplittingParams};
use tomtree::{ChronoTree, PljContour, Prim};

pub const MAX_INDIVIDUALS: usize = 1000;

fn families(unit_speed: bool) -> Vec<SplittingParams> {
    let mut v = vec![
        SplittingParams::new(1.0, JumpLaw::Exp(2.0)),
        SplittingParams::new(1.0, JumpLaw::Exp(1.1)),
        SplittingParams::new(2.0, JumpLaw::Exp(1.0)).with_truncation(2.0),
        SplittingParams::new(
            1.5,
            JumpLaw::Table {
                values: vec![0.5, 1.0],
                probs: vec![0.5, 0.5],
            },
        )
        .with_truncation(3.0),
    ];
    if !unit_speed {
        v.push(
            SplittingParams::new(1.0, JumpLaw::Exp(1.5)).with_speeds(JumpLaw::Table {
                values: vec![0.5, 2.0],
                probs: vec![0.5, 0.5],
            }),
        );
    }
    v.into_iter().map(|p| p.with_max_individuals(MAX_INDIVIDUALS)).collect()
}

/// A splitting tree with at most [`MAX_INDIVIDUALS`] individuals, from a
/// family picked by `i`; oversized draws are redrawn.
pub fn random_tree(rng: &mut ChaCha8Rng, i: usize, unit_speed: bool) -> ChronoTree {
    let fam = families(unit_speed);
    let p = &fam[i % fam.len()];
    loop {
        if let Ok(t) = simulate_splitting_tree(p, rng) {
            return t;
        }
    }
}

/// The contour of a Lévy-coded tree: a jump to `x` followed by the free
/// process killed at 0.
pub fn levy_contour(rng: &mut ChaCha8Rng) -> PljContour {
    let p = LevyParams::drift(1.0).with_jumps(1.0, JumpLaw::Exp(2.0));
    loop {
        let x = tomtree::grid::quantize(rng.random_range(0.1..2.0));
        let path = kill_at_zero(&sample_path(&p, x, 200.0, rng).unwrap());
        if path.killed_at.is_none() {
            continue;
        }
        let mut prims = vec![Prim::Jump(x)];
        prims.extend_from_slice(path.prims().unwrap());
        return PljContour::new(prims).unwrap();
    }
}
