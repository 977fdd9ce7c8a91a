//! Chronological trees, their contours, truncation by time change, and
//! simulation of splitting trees and reflected spectrally positive Lévy
//! processes, with Monte Carlo checks of the splitting property.
//!
//! Heights live on the dyadic grid `k * 2^-32`, so sums of heights are exact
//! and the coding identities hold bit for bit.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod levy;
pub mod rng;
pub mod splitting;
pub mod stats;
pub mod tree;

pub use contour::{decode, encode, PljContour, Prim};
pub use error::{Error, Result};
pub use tree::{ChronoTree, Individual, PointRef};
