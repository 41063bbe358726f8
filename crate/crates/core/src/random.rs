//! Random covers for fuzzing.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::Rng;

use crate::cover::{CoverBuilder, DoubleCover, Sign};
use crate::graph::{EdgeSet, HalfEdgeGraph, Orientation};
use crate::linalg::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverShape {
    pub max_vertices: usize,
    /// Bound on undilated edges.
    pub max_edges: usize,
    /// Bound on dilated edges.
    pub max_dilated_edges: usize,
}

impl Default for CoverShape {
    fn default() -> Self {
        CoverShape { max_vertices: 6, max_edges: 10, max_dilated_edges: 2 }
    }
}

/// Length `p/q` with `1 ≤ p ≤ 9`, `1 ≤ q ≤ 4`.
pub fn random_length<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(1..=9)), BigInt::from(rng.gen_range(1..=4)))
}

/// Draws a connected nontrivial cover, redrawing until one is found.
pub fn random_cover<R: Rng + ?Sized>(rng: &mut R, shape: &CoverShape) -> DoubleCover {
    loop {
        if let Some(c) = try_random_cover(rng, shape) {
            return c;
        }
    }
}

fn try_random_cover<R: Rng + ?Sized>(rng: &mut R, shape: &CoverShape) -> Option<DoubleCover> {
    let n = rng.gen_range(1..=shape.max_vertices.max(1));
    let dilated: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut b = CoverBuilder::new();
    for (v, &d) in dilated.iter().enumerate() {
        b = b.vertex(&format!("v{v}"), d);
    }
    let m = rng.gen_range(1..=shape.max_edges.max(1));
    for e in 0..m {
        let (t, h) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let sign = if dilated[t] || dilated[h] { Sign::Plus } else { sign };
        b = b.edge(&format!("e{e}"), &format!("v{t}"), &format!("v{h}"), random_length(rng), sign);
    }
    let pool: Vec<usize> = (0..n).filter(|&v| dilated[v]).collect();
    if !pool.is_empty() {
        for e in 0..rng.gen_range(0..=shape.max_dilated_edges) {
            let (t, h) = (pool[rng.gen_range(0..pool.len())], pool[rng.gen_range(0..pool.len())]);
            b = b.dilated_edge(&format!("d{e}"), &format!("v{t}"), &format!("v{h}"), random_length(rng));
        }
    }
    b.build().ok()
}

/// Reverses each edge independently with probability one half.
pub fn random_orientation<R: Rng + ?Sized>(rng: &mut R, g: &HalfEdgeGraph) -> Orientation {
    let reversed: EdgeSet = g.edges().filter(|_| rng.gen_bool(0.5)).collect();
    Orientation::reversing(g, &reversed)
}

/// Replaces every length by a fresh random one.
pub fn randomize_lengths<R: Rng + ?Sized>(rng: &mut R, cover: &DoubleCover) -> DoubleCover {
    cover.base().edges().fold(cover.clone(), |c, e| {
        c.with_length(e, random_length(rng)).expect("positive length on an existing edge")
    })
}
