//! Problem instances: polygons, boundary identifications, and their refinement to an
//! edge-to-edge gluing with quotient vertex classes.

mod check;
mod parse;
mod refine;

pub use check::{check_alexandrov, AngleVerdict, OffendingClass, TilingVerdict, TopologyVerdict, ValidationReport};
pub use parse::{parse_spec, to_document};
pub use refine::refine;

use serde::Serialize;
use thiserror::Error;

use crate::geom::perimeter;
use crate::{Point, Tolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GluingError {
    #[error("malformed instance document: {0}")]
    Malformed(String),
    #[error("instance has no polygons")]
    Empty,
    #[error("duplicate polygon id `{0}`")]
    DuplicateId(String),
    #[error("polygon `{0}` has fewer than 3 vertices")]
    TooFewVertices(String),
    #[error("polygon `{id}` has a non-finite coordinate")]
    NonFinite { id: String },
    #[error("polygon `{id}` repeats vertex {index}")]
    RepeatedVertex { id: String, index: usize },
    #[error("polygon `{0}` is not simple")]
    NotSimple(String),
    #[error("polygon `{0}` is clockwise or has zero area")]
    Clockwise(String),
    #[error("gluing {gluing} names unknown polygon `{id}`")]
    UnknownPolygon { gluing: usize, id: String },
    #[error("gluing {gluing}: {detail}")]
    ArcOutOfRange { gluing: usize, detail: String },
    #[error("gluing {gluing}: zip point must be the same point on both sides")]
    BadZip { gluing: usize },
    #[error("gluing {gluing}: arc lengths differ ({a} vs {b})")]
    ArcLengthMismatch { gluing: usize, a: f64, b: f64 },
    #[error("gluing {gluing}: arcs do not refine to matching edge sequences")]
    RefinementMismatch { gluing: usize },
    #[error("refinement did not reach a fixed point within {cap} insertions")]
    RefinementDiverged { cap: usize },
    #[error("only {found} cone points; a doubly covered polygon needs at least 3")]
    TooFewCones { found: usize },
}

/// An input polygon, counterclockwise, in abstract length units.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonSpec {
    pub id: String,
    pub vertices: Vec<Point>,
}

impl PolygonSpec {
    pub fn perimeter(&self) -> f64 {
        perimeter(&self.vertices)
    }

    /// Arc-length parameter of each vertex, starting from vertex 0.
    pub fn vertex_params(&self) -> Vec<f64> {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            out.push(acc);
            acc += self.vertices[i].dist(self.vertices[(i + 1) % n]);
        }
        out
    }

    /// Point at arc-length parameter `s` (taken modulo the perimeter).
    pub fn point_at(&self, s: f64) -> Point {
        let n = self.vertices.len();
        let per = self.perimeter();
        let mut s = crate::geom::wrap(s, per);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = a.dist(b);
            if s <= len || i == n - 1 {
                return a.lerp(b, (s / len).min(1.0));
            }
            s -= len;
        }
        unreachable!("polygon has at least three vertices")
    }
}

/// A stretch of one polygon's boundary, running forward from `start` for `length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryArc {
    /// Index into [`GluingSpec::polygons`].
    pub polygon: usize,
    pub start: f64,
    pub length: f64,
}

impl BoundaryArc {
    pub fn is_zip(&self) -> bool {
        self.length == 0.0
    }
}

/// Two arcs glued with opposite orientations: `a` read forward meets `b` read backward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Identification {
    pub a: BoundaryArc,
    pub b: BoundaryArc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingSpec {
    pub polygons: Vec<PolygonSpec>,
    pub identifications: Vec<Identification>,
}

impl GluingSpec {
    /// Total number of input polygon vertices.
    pub fn vertex_count(&self) -> usize {
        self.polygons.iter().map(|p| p.vertices.len()).sum()
    }

    pub fn total_perimeter(&self) -> f64 {
        self.polygons.iter().map(PolygonSpec::perimeter).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.polygons.iter().map(|p| crate::geom::signed_area(&p.vertices)).sum()
    }
}

/// A polygon after refinement: original vertices plus every inserted boundary point.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedPolygon {
    pub id: String,
    pub vertices: Vec<Point>,
    /// Arc-length parameter of each refined vertex.
    pub params: Vec<f64>,
    /// Index of the input vertex this refined vertex coincides with, if any.
    pub original: Vec<Option<usize>>,
    pub perimeter: f64,
    /// Global id of refined vertex 0.
    pub offset: usize,
}

impl RefinedPolygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientClass {
    /// Global refined vertex ids glued into this point.
    pub members: Vec<usize>,
    /// Total surface angle around the point: sum of member corner angles.
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TilingDefect {
    Gap { polygon: String, from: f64, to: f64 },
    Overlap { polygon: String, from: f64, to: f64, times: usize },
}

/// Edge-to-edge form of a [`GluingSpec`].
///
/// Boundary vertices and edges carry global ids: vertex `k` of polygon `p` has id
/// `polygons[p].offset + k`, and the edge leaving it shares that id.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedGluing {
    pub polygons: Vec<RefinedPolygon>,
    /// Partner of each boundary edge; `None` only when the perimeter tiling is defective.
    pub pairing: Vec<Option<usize>>,
    pub class_of: Vec<usize>,
    pub classes: Vec<QuotientClass>,
    pub corner_angles: Vec<f64>,
    pub defects: Vec<TilingDefect>,
    /// Points inserted by the closure step (arc endpoints excluded).
    pub insertions: usize,
    pub input_vertex_count: usize,
    pub tolerances: Tolerances,
}

impl RefinedGluing {
    pub fn vertex_count(&self) -> usize {
        self.class_of.len()
    }

    /// `(polygon, local index)` of a global vertex or edge id.
    pub fn locate(&self, global: usize) -> (usize, usize) {
        let p = self.polygons.partition_point(|rp| rp.offset <= global) - 1;
        (p, global - self.polygons[p].offset)
    }

    /// Global id of the vertex following `global` along its polygon boundary.
    pub fn next(&self, global: usize) -> usize {
        let (p, k) = self.locate(global);
        let rp = &self.polygons[p];
        rp.offset + (k + 1) % rp.len()
    }

    /// Global id of the vertex preceding `global` along its polygon boundary.
    pub fn prev(&self, global: usize) -> usize {
        let (p, k) = self.locate(global);
        let rp = &self.polygons[p];
        rp.offset + (k + rp.len() - 1) % rp.len()
    }

    pub fn position(&self, global: usize) -> Point {
        let (p, k) = self.locate(global);
        self.polygons[p].vertices[k]
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        self.position(edge).dist(self.position(self.next(edge)))
    }

    /// Number of glued edge pairs plus unpaired edges.
    pub fn quotient_edge_count(&self) -> usize {
        let paired = self.pairing.iter().filter(|p| p.is_some()).count();
        paired / 2 + (self.pairing.len() - paired)
    }

    pub fn is_flat_angle(&self, angle: f64) -> bool {
        (angle - std::f64::consts::TAU).abs() <= self.tolerances.angle
    }

    /// Σ (2π − angle) − 4π over all quotient classes.
    pub fn gauss_bonnet_residual(&self) -> f64 {
        let total: f64 = self.classes.iter().map(|c| std::f64::consts::TAU - c.angle).sum();
        total - 2.0 * std::f64::consts::TAU
    }

    /// Sort key used for the stable cone ordering: smallest (polygon, parameter) of any member.
    pub fn class_key(&self, class: usize) -> (usize, f64) {
        self.classes[class]
            .members
            .iter()
            .map(|&g| {
                let (p, k) = self.locate(g);
                (p, self.polygons[p].params[k])
            })
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)))
            .expect("classes are non-empty")
    }
}

/// A quotient class with total angle strictly below 2π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConePoint {
    pub class: usize,
    pub angle: f64,
}

/// The cone points `v_1..v_n`, ordered by (polygon index, smallest boundary parameter).
///
/// Classes within the angle tolerance of 2π are flat and excluded.
pub fn cone_points(r: &RefinedGluing) -> Result<Vec<ConePoint>, GluingError> {
    let limit = std::f64::consts::TAU - r.tolerances.angle;
    let mut cones: Vec<(usize, f64, ConePoint)> = r
        .classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.angle < limit)
        .map(|(i, c)| {
            let (p, s) = r.class_key(i);
            (p, s, ConePoint { class: i, angle: c.angle })
        })
        .collect();
    cones.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if cones.len() < 3 {
        return Err(GluingError::TooFewCones { found: cones.len() });
    }
    Ok(cones.into_iter().map(|c| c.2).collect())
}
