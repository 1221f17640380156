//! Numerical laboratory for Reifenberg-flat sets.
//!
//! The crate generates point-cloud models of classical flat and fractal sets
//! (slab combs, Koch-type curves, Lipschitz graphs, plane patches), certifies
//! the twelve weak/strong affine approximation properties on a discrete scale
//! ladder, estimates Minkowski dimensions and packing/Hausdorff pre-measures,
//! and reproduces the desk-verifiable rows of the dimension/measure
//! classification table via the `verify-table` harness.
//!
//! Everything is deterministic: generators are seeded, searches use fixed
//! grids and tie-breaks, and reports serialize to byte-identical JSON across
//! reruns.

pub mod cli;
pub mod dimension;
pub mod error;
pub mod flatness;
pub mod generators;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod parallel;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{AffinePlane, Ball, PointCloud, ScaleLadder};
