//! The intrinsic surface: triangulated polygons, twin connectivity across glued
//! edges, per-face planar charts and an angular coordinate around every vertex.
//!
//! Half-edge `h` belongs to face `h / 3` and leaves that face's corner `h % 3`, so a
//! half-edge id also names the corner at its tail.

mod triangulate;

pub use triangulate::{degenerate, ear_clip};

use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::Serialize;
use thiserror::Error;

use crate::geom::{interior_angle, signed_area, wrap};
use crate::gluing::{cone_points, ConePoint, GluingError, RefinedGluing};
use crate::{Point, Rigid, Tolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("cannot triangulate polygon `{0}` without degenerate triangles")]
    Triangulation(String),
    #[error("boundary edge {0} has no glued partner")]
    Unpaired(usize),
    #[error("corners around vertex class {class} do not form a single fan")]
    NonManifold { class: usize },
    #[error("vertex class {class}: chart angle {chart} differs from gluing angle {gluing}")]
    AngleMismatch { class: usize, chart: f64, gluing: f64 },
    #[error("twin edges {h} and {twin} differ in length ({a} vs {b})")]
    TwinLength { h: usize, twin: usize, a: f64, b: f64 },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("half-edge {h} does not leave vertex {vertex}")]
    NotIncident { h: usize, vertex: usize },
    #[error(transparent)]
    Gluing(#[from] GluingError),
}

/// A triangle with its own planar chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Index of the refined polygon the triangle was cut from.
    pub polygon: usize,
    /// Corner coordinates, counterclockwise, in the polygon's input coordinates.
    pub pos: [Point; 3],
    /// Global refined boundary vertex id of each corner.
    pub corner_vertex: [usize; 3],
}

/// Direction leaving a vertex, for [`Surface::angle_of_direction`].
#[derive(Clone, Copy, Debug)]
pub enum Direction {
    /// Along a half-edge leaving the vertex.
    Halfedge(usize),
    /// A ray leaving the tail corner of `corner`, given in that face's chart.
    Ray { corner: usize, dir: Point },
}

#[derive(Clone, Debug)]
pub struct Surface {
    pub faces: Vec<Face>,
    twin: Vec<usize>,
    /// Quotient class at the tail of each half-edge.
    vertex_of: Vec<usize>,
    corner_angle: Vec<f64>,
    /// Angular coordinate of each corner's outgoing half-edge around its vertex.
    corner_offset: Vec<f64>,
    /// Counterclockwise corner fan of each quotient vertex, starting at its reference.
    fans: Vec<Vec<usize>>,
    vertex_angle: Vec<f64>,
    /// Cone points in the stable gluing order.
    pub cones: Vec<ConePoint>,
    cone_of: Vec<Option<usize>>,
    pub tolerances: Tolerances,
}

impl Surface {
    /// Triangulates every refined polygon and glues the triangles along the pairing.
    pub fn build(r: &RefinedGluing) -> Result<Self, SurfaceError> {
        let cones = cone_points(r)?;
        let mut faces = Vec::new();
        let mut boundary = HashMap::new();
        let mut diagonals = HashMap::new();
        for (pi, rp) in r.polygons.iter().enumerate() {
            let tris = ear_clip(&rp.vertices).ok_or_else(|| SurfaceError::Triangulation(rp.id.clone()))?;
            let n = rp.len();
            for t in tris {
                let f = faces.len();
                for i in 0..3 {
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    let h = 3 * f + i;
                    if b == (a + 1) % n {
                        boundary.insert(rp.offset + a, h);
                    } else {
                        diagonals.insert((rp.offset + a, rp.offset + b), h);
                    }
                }
                faces.push(Face {
                    polygon: pi,
                    pos: t.map(|k| rp.vertices[k]),
                    corner_vertex: t.map(|k| rp.offset + k),
                });
            }
        }

        let mut twin = vec![usize::MAX; 3 * faces.len()];
        for (&(a, b), &h) in &diagonals {
            twin[h] = diagonals[&(b, a)];
        }
        for (&e, &h) in &boundary {
            let partner = r.pairing[e].ok_or(SurfaceError::Unpaired(e))?;
            twin[h] = boundary[&partner];
        }

        let vertex_of: Vec<usize> = (0..twin.len()).map(|h| r.class_of[faces[h / 3].corner_vertex[h % 3]]).collect();
        let corner_angle: Vec<f64> = (0..twin.len())
            .map(|h| {
                let p = &faces[h / 3].pos;
                let i = h % 3;
                interior_angle(p[(i + 2) % 3], p[i], p[(i + 1) % 3])
            })
            .collect();

        let classes = r.classes.len();
        let mut fans = vec![Vec::new(); classes];
        let mut corner_offset = vec![0.0; twin.len()];
        let mut vertex_angle = vec![0.0; classes];
        let mut members = vec![0usize; classes];
        for &v in &vertex_of {
            members[v] += 1;
        }
        for (h, &v) in vertex_of.iter().enumerate() {
            if !fans[v].is_empty() {
                continue;
            }
            // Smallest half-edge of the class is the reference.
            let mut cur = h;
            let mut acc = 0.0;
            loop {
                fans[v].push(cur);
                corner_offset[cur] = acc;
                acc += corner_angle[cur];
                cur = twin[3 * (cur / 3) + (cur + 2) % 3];
                if cur == h || fans[v].len() > members[v] {
                    break;
                }
            }
            if cur != h || fans[v].len() != members[v] {
                return Err(SurfaceError::NonManifold { class: v });
            }
            vertex_angle[v] = acc;
            let gluing = r.classes[v].angle;
            if (acc - gluing).abs() > 1e-9 * gluing.max(1.0) {
                return Err(SurfaceError::AngleMismatch { class: v, chart: acc, gluing });
            }
        }

        let mut cone_of = vec![None; classes];
        for (i, c) in cones.iter().enumerate() {
            cone_of[c.class] = Some(i);
        }
        let s = Surface {
            faces,
            twin,
            vertex_of,
            corner_angle,
            corner_offset,
            fans,
            vertex_angle,
            cones,
            cone_of,
            tolerances: r.tolerances,
        };
        for h in 0..s.twin.len() {
            let (a, b) = (s.edge_length(h), s.edge_length(s.twin[h]));
            if (a - b).abs() > r.tolerances.length * a.max(b).max(1.0) {
                return Err(SurfaceError::TwinLength { h, twin: s.twin[h], a, b });
            }
        }
        Ok(s)
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn halfedge_count(&self) -> usize {
        self.twin.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.fans.len()
    }

    /// Undirected edges of the quotient.
    pub fn edge_count(&self) -> usize {
        self.twin.len() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    #[inline]
    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    #[inline]
    pub fn next(h: usize) -> usize {
        3 * (h / 3) + (h + 1) % 3
    }

    #[inline]
    pub fn prev(h: usize) -> usize {
        3 * (h / 3) + (h + 2) % 3
    }

    /// Quotient vertex at the tail of `h`.
    #[inline]
    pub fn vertex(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    #[inline]
    pub fn tail(&self, h: usize) -> Point {
        self.faces[h / 3].pos[h % 3]
    }

    #[inline]
    pub fn head(&self, h: usize) -> Point {
        self.faces[h / 3].pos[(h + 1) % 3]
    }

    pub fn edge_length(&self, h: usize) -> f64 {
        self.tail(h).dist(self.head(h))
    }

    #[inline]
    pub fn corner_angle(&self, h: usize) -> f64 {
        self.corner_angle[h]
    }

    #[inline]
    pub fn corner_offset(&self, h: usize) -> f64 {
        self.corner_offset[h]
    }

    /// Corners around `v`, counterclockwise from the reference half-edge.
    pub fn fan(&self, v: usize) -> &[usize] {
        &self.fans[v]
    }

    pub fn reference_halfedge(&self, v: usize) -> usize {
        self.fans[v][0]
    }

    /// Total angle around quotient vertex `v`, summed from the face charts.
    pub fn vertex_angle(&self, v: usize) -> Result<f64, SurfaceError> {
        self.vertex_angle.get(v).copied().ok_or(SurfaceError::UnknownVertex(v))
    }

    #[inline]
    pub fn angle(&self, v: usize) -> f64 {
        self.vertex_angle[v]
    }

    pub fn cone_index(&self, v: usize) -> Option<usize> {
        self.cone_of[v]
    }

    /// Quotient vertex of cone `i`.
    pub fn cone_vertex(&self, i: usize) -> usize {
        self.cones[i].class
    }

    pub fn is_cone(&self, v: usize) -> bool {
        self.cone_of[v].is_some()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        signed_area(&self.faces[f].pos)
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Rigid map from the chart of `h`'s face to the chart of its twin's face.
    pub fn transition(&self, h: usize) -> Rigid {
        let t = self.twin[h];
        Rigid::from_segments(self.tail(h), self.head(h), self.head(t), self.tail(t))
    }

    /// Counterclockwise angle from the outgoing half-edge of `corner` to `dir`, clamped
    /// into the corner. `dir` is expected to point into (or along the sides of) the corner.
    pub fn angle_in_corner(&self, corner: usize, dir: Point) -> f64 {
        let out = self.head(corner) - self.tail(corner);
        let a = out.cross(dir).atan2(out.dot(dir));
        let max = self.corner_angle[corner];
        if a < 0.0 {
            // Slightly clockwise of the outgoing edge, or past the incoming edge.
            if a < -0.5 * (TAU - max) {
                max
            } else {
                0.0
            }
        } else {
            a.min(max)
        }
    }

    /// Angular coordinate in `[0, θ(v))` of a direction leaving vertex `v`, measured
    /// counterclockwise from `v`'s reference half-edge.
    pub fn angle_of_direction(&self, v: usize, direction: Direction) -> Result<f64, SurfaceError> {
        let theta = self.vertex_angle(v)?;
        let (corner, within) = match direction {
            Direction::Halfedge(h) => (h, 0.0),
            Direction::Ray { corner, dir } => (corner, self.angle_in_corner(corner, dir)),
        };
        if corner >= self.twin.len() || self.vertex_of[corner] != v {
            return Err(SurfaceError::NotIncident { h: corner, vertex: v });
        }
        let a = wrap(self.corner_offset[corner] + within, theta);
        // Directions a rounding error short of a full turn are the datum itself.
        Ok(if theta - a <= 1e-12 * theta { 0.0 } else { a })
    }

    /// Inverse of [`Surface::angle_of_direction`]: the corner containing angular
    /// coordinate `angle` around `v`, and the angle within that corner.
    pub fn locate_angle(&self, v: usize, angle: f64) -> (usize, f64) {
        let fan = &self.fans[v];
        let a = wrap(angle, self.vertex_angle[v]);
        let k = fan.partition_point(|&h| self.corner_offset[h] <= a).max(1) - 1;
        let h = fan[k];
        (h, (a - self.corner_offset[h]).clamp(0.0, self.corner_angle[h]))
    }

    /// Unit direction at angle `within` counterclockwise from the outgoing half-edge of `corner`.
    pub fn direction_in_corner(&self, corner: usize, within: f64) -> Point {
        let out = (self.head(corner) - self.tail(corner)).normalized();
        let (s, c) = within.sin_cos();
        out.rotated(c, s)
    }

    /// Curvature sum Σ (2π − θ(v)) over all vertices minus 4π.
    pub fn gauss_bonnet_residual(&self) -> f64 {
        self.vertex_angle.iter().map(|a| TAU - a).sum::<f64>() - 2.0 * TAU
    }

    pub fn debug_dump(&self) -> String {
        let dump = Dump {
            faces: self
                .faces
                .iter()
                .enumerate()
                .map(|(f, face)| DumpFace {
                    face: f,
                    polygon: face.polygon,
                    vertices: [0, 1, 2].map(|i| self.vertex_of[3 * f + i]),
                    corners: face.pos.map(|p| [p.x, p.y]),
                    twins: [0, 1, 2].map(|i| self.twin[3 * f + i]),
                })
                .collect(),
            vertices: (0..self.vertex_count())
                .map(|v| DumpVertex {
                    vertex: v,
                    angle: self.vertex_angle[v],
                    cone: self.cone_of[v],
                    fan: self.fans[v].clone(),
                })
                .collect(),
            euler_characteristic: self.euler_characteristic(),
        };
        serde_json::to_string_pretty(&dump).expect("dump serializes")
    }
}

#[derive(Serialize)]
struct Dump {
    faces: Vec<DumpFace>,
    vertices: Vec<DumpVertex>,
    euler_characteristic: i64,
}

#[derive(Serialize)]
struct DumpFace {
    face: usize,
    polygon: usize,
    vertices: [usize; 3],
    corners: [[f64; 2]; 3],
    twins: [usize; 3],
}

#[derive(Serialize)]
struct DumpVertex {
    vertex: usize,
    angle: f64,
    cone: Option<usize>,
    fan: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::{check_alexandrov, parse_spec, refine};
    use std::f64::consts::PI;

    pub(crate) fn surface(text: &str) -> Surface {
        let tol = Tolerances::default();
        let r = refine(&parse_spec(text, &tol).unwrap(), &tol).unwrap();
        assert!(check_alexandrov(&r).all_pass());
        Surface::build(&r).unwrap()
    }

    const SQUARE: &str = r#"{"polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
        "gluings": [{"a": ["sq", 0, 1], "b": ["sq", 3, 4]}, {"a": ["sq", 1, 2], "b": ["sq", 2, 3]}]}"#;

    #[test]
    fn square_counts() {
        let s = surface(SQUARE);
        assert_eq!(s.face_count(), 2);
        assert_eq!(s.halfedge_count(), 6);
        assert_eq!(s.vertex_count(), 3);
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.euler_characteristic(), 2);
        for h in 0..6 {
            assert_eq!(s.twin(s.twin(h)), h);
            assert_ne!(s.twin(h), h);
        }
    }

    #[test]
    fn square_angles() {
        let s = surface(SQUARE);
        let got: Vec<f64> = (0..3).map(|i| s.vertex_angle(s.cone_vertex(i)).unwrap()).collect();
        for (g, w) in got.iter().zip([PI / 2.0, PI, PI / 2.0]) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
        assert!(s.gauss_bonnet_residual().abs() < 1e-12);
        assert!((s.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angular_coordinate_datum() {
        let s = surface(SQUARE);
        let v = s.cone_vertex(1);
        let r = s.reference_halfedge(v);
        assert_eq!(s.angle_of_direction(v, Direction::Halfedge(r)).unwrap(), 0.0);
        let fan = s.fan(v);
        let second = fan[1];
        let a = s.angle_of_direction(v, Direction::Halfedge(second)).unwrap();
        assert!((a - s.corner_angle(r)).abs() < 1e-15);
        // The last corner starts θ minus its own angle around.
        let last = *fan.last().unwrap();
        let a = s.angle_of_direction(v, Direction::Halfedge(last)).unwrap();
        assert!((a - (s.angle(v) - s.corner_angle(last))).abs() < 1e-12);
        let other = s.cone_vertex(0);
        assert!(s.angle_of_direction(other, Direction::Halfedge(r)).is_err());
    }

    #[test]
    fn twin_transitions_match_edges() {
        let s = surface(SQUARE);
        for h in 0..s.halfedge_count() {
            let t = s.transition(h);
            let tw = s.twin(h);
            assert!(t.apply(s.tail(h)).dist(s.head(tw)) < 1e-12);
            assert!(t.apply(s.head(h)).dist(s.tail(tw)) < 1e-12);
        }
    }

    #[test]
    fn locate_angle_inverts_direction_angle() {
        let s = surface(SQUARE);
        let v = s.cone_vertex(1);
        for k in 0..20 {
            let a = s.angle(v) * k as f64 / 20.0;
            let (h, w) = s.locate_angle(v, a);
            let d = s.direction_in_corner(h, w);
            let back = s.angle_of_direction(v, Direction::Ray { corner: h, dir: d }).unwrap();
            assert!((back - a).abs() < 1e-12, "{a} {back}");
        }
    }

    #[test]
    fn dump_lists_faces_and_cones() {
        let s = surface(SQUARE);
        let d: serde_json::Value = serde_json::from_str(&s.debug_dump()).unwrap();
        assert_eq!(d["faces"].as_array().unwrap().len(), 2);
        assert_eq!(d["euler_characteristic"], 2);
        let cones = d["vertices"].as_array().unwrap().iter().filter(|v| !v["cone"].is_null()).count();
        assert_eq!(cones, 3);
    }
}
