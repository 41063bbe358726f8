//! Exact computations for harmonic double covers of metric graphs.
//!
//! A [`DoubleCover`] is described by its base graph, the dilation data and a
//! sign on every free edge. From it the crate builds the total graph, the
//! signed graphic matroid `M` and its dual `M*`, the oriented fundamental
//! cycles that span the kernel of the pushforward on first homology, and the
//! principalized Prym variety: Gram matrix, volume, polarization type.
//!
//! All arithmetic is exact (`num-bigint`/`num-rational`). The crate is
//! `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod cover;
pub mod cycles;
pub mod graph;
pub mod linalg;
pub mod matroid;
pub mod poly;
pub mod prym;
pub mod random;

mod error;

pub use cover::{CoverData, DoubleCover, Sign};
pub use error::Error;
pub use graph::{Chain, EdgeId, EdgeSet, HalfEdgeGraph, HalfEdgeId, Orientation, VertexId};
pub use linalg::{IntMatrix, RatMatrix, Rational};
pub use matroid::SignedMatroid;
pub use prym::PrymData;

pub type Result<T, E = Error> = core::result::Result<T, E>;
