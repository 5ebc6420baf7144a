//! Detection and reconstruction of flat (doubly covered convex polygon) results of
//! polygon gluings.
//!
//! The pipeline runs entirely on the intrinsic surface produced by a gluing:
//!
//! 1. [`gluing`]: parse an instance, refine it to an edge-to-edge gluing, validate it
//!    and identify the cone points.
//! 2. [`surface`]: triangulate the polygons into an intrinsic half-edge surface with
//!    per-face charts.
//! 3. [`geodesic`]: all-pairs exact shortest paths between cone points, with an
//!    exhaustive unfolding oracle for cross-checking.
//! 4. [`rim`]: search for a simple closed path through every cone point that bisects
//!    the total angle at each one.
//! 5. [`layout`]: cut along the rim, develop both halves into the plane and verify
//!    they form the same convex polygon.
//!
//! [`pipeline::solve`] chains the steps; [`output`] renders result documents and SVG.

pub mod generate;
pub mod geodesic;
pub mod geom;
pub mod gluing;
pub mod layout;
pub mod output;
pub mod pipeline;
pub mod rim;
pub mod surface;

use serde::{Deserialize, Serialize};

/// Scalar used by the pipeline. The tolerances below sit under single precision, so
/// only the planar kernel in [`geom`] is instantiated at other widths.
pub type Real = f64;
pub type Point = geom::Vec2<Real>;
pub type Rigid = geom::Rigid2<Real>;

pub use geodesic::{GeodesicPath, ShortestPathSet};
pub use gluing::{ConePoint, GluingSpec, RefinedGluing, ValidationReport};
pub use layout::FlatPolyhedron;
pub use pipeline::{solve, SolveOptions, SolveOutcome};
pub use rim::RimCandidate;
pub use surface::Surface;

/// Numerical tolerances shared by every stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance on arc-length equality.
    pub length: f64,
    /// Absolute tolerance, in radians, on angle comparisons (2π tests and bisection).
    pub angle: f64,
    /// Relative tolerance under which two geodesic lengths count as tied.
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { length: 1e-9, angle: 1e-7, tie: 1e-9 }
    }
}
