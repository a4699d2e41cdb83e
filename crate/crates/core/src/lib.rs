//! Pairwise intersection-flag implicit shapes.
//!
//! A shape is described by two queries: `flag(p1, p2)`, which says whether the
//! straight segment between two points crosses the surface, and `udf(p)`, the
//! unsigned distance to the surface. Neither needs an inside or an outside, so
//! open sheets and nested shells are represented as easily as closed solids.
//!
//! The crate provides
//!
//! * exact kernels over triangle meshes ([`geometry`]),
//! * field backends: analytic primitives, mesh oracles and a learned model
//!   ([`fields`], [`learner`]),
//! * training-pair generation ([`datagen`]),
//! * surface extraction: coarse-to-fine cube localization, marching cubes
//!   driven by per-cube label assignment, and distance-driven refinement
//!   ([`extractor`]),
//! * Chamfer / F-score evaluation ([`metrics`]) and a command line ([`cli`]).

// Validation uses `!(x > 0.0)` style checks so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod datagen;
pub mod error;
pub mod extractor;
pub mod fields;
pub mod geometry;
pub mod learner;
pub mod metrics;

pub use error::{GifsError, Result};
pub use geometry::{Point3, RngSeed, Segment, TriangleMesh, Vec3};
