//! Cutting the surface along the rim and developing both halves into the plane.

use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::geodesic::ShortestPathSet;
use crate::geom::{interior_angle, orient, point_segment_dist, signed_area};
use crate::rim::RimCandidate;
use crate::surface::Surface;
use crate::{Point, Rigid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("rim piece in face {face} does not end on the face boundary")]
    ChordOutsideFace { face: usize },
    #[error("cutting along the rim gives {found} components instead of 2")]
    Components { found: usize },
    #[error("development inconsistent by {worst} (tolerance {tol})")]
    Inconsistent { worst: f64, tol: f64 },
    #[error("cone {cone} does not appear on the boundary of a half")]
    MissingVertex { cone: usize },
    #[error("images of cone {cone} spread by {spread}")]
    VertexSpread { cone: usize, spread: f64 },
    #[error("both halves traverse the rim in the same orientation")]
    Orientation,
    #[error("halves not congruent: worst vertex distance {worst}")]
    NotCongruent { worst: f64 },
    #[error("developed polygon not convex at vertex {vertex} (cross product {cross})")]
    NotConvex { vertex: usize, cross: f64 },
    #[error("edge {edge} has length {developed}, rim segment {rim}")]
    EdgeLength { edge: usize, developed: f64, rim: f64 },
    #[error("interior angle {angle} at vertex {vertex}, expected {expected}")]
    Angle { vertex: usize, angle: f64, expected: f64 },
    #[error("half areas {a} and {b} do not split the surface area {total}")]
    Area { a: f64, b: f64, total: f64 },
}

/// A convex piece of a face, in the face's chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub face: usize,
    pub polygon: Vec<Point>,
}

/// One side of the rim: face pieces plus their adjacencies across uncut edges.
#[derive(Clone, Debug)]
pub struct HalfSurface {
    pub pieces: Vec<Piece>,
    /// `(a, b, h)`: piece `a` meets piece `b` across half-edge `h` of `a`'s face.
    pub links: Vec<(usize, usize, usize)>,
}

impl HalfSurface {
    pub fn area(&self) -> f64 {
        self.pieces.iter().map(|p| signed_area(&p.polygon)).sum()
    }
}

/// A half laid out in one planar chart.
#[derive(Clone, Debug)]
pub struct Development {
    /// Chart-to-plane map of every piece.
    pub maps: Vec<Rigid>,
    /// Image of each rim vertex, in rim order.
    pub vertices: Vec<Point>,
    pub area: f64,
    /// Largest disagreement between two placements of the same piece.
    pub discrepancy: f64,
}

/// The doubly covered convex polygon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatPolyhedron {
    /// Counterclockwise, first rim vertex at the origin, first edge along +x.
    pub polygon: Vec<Point>,
    /// Cone index of each polygon vertex.
    pub cones: Vec<usize>,
    pub half_areas: [f64; 2],
    pub edge_lengths: Vec<f64>,
    pub interior_angles: Vec<f64>,
    /// Largest vertex distance between the two halves after alignment.
    pub congruence_error: f64,
}

fn scale_of(s: &Surface) -> f64 {
    s.faces.iter().flat_map(|f| f.pos).fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs())).max(1.0)
}

/// Cuts every face along the rim traces and groups the pieces into the two sides.
pub fn split_surface(
    s: &Surface,
    sigma: &ShortestPathSet,
    rim: &RimCandidate,
) -> Result<[HalfSurface; 2], LayoutError> {
    let eps = 1e-9 * scale_of(s);
    let mut chords: Vec<Vec<(Point, Point)>> = vec![Vec::new(); s.face_count()];
    // Intervals of half-edges covered by rim pieces running along them, as edge parameters.
    let mut blocked: Vec<Vec<(f64, f64)>> = vec![Vec::new(); s.halfedge_count()];
    for &k in &rim.segments {
        for step in &sigma.path(k).trace {
            if step.from.dist(step.to) <= eps {
                continue;
            }
            let along = (0..3).map(|le| 3 * step.face + le).find(|&h| {
                let (a, b) = (s.tail(h), s.head(h));
                point_segment_dist(step.from, a, b) <= eps && point_segment_dist(step.to, a, b) <= eps
            });
            match along {
                Some(h) => {
                    let (t0, t1) = (edge_param(s, h, step.from), edge_param(s, h, step.to));
                    let (lo, hi) = (t0.min(t1), t0.max(t1));
                    blocked[h].push((lo, hi));
                    blocked[s.twin(h)].push((1.0 - hi, 1.0 - lo));
                }
                None => chords[step.face].push((step.from, step.to)),
            }
        }
    }

    let mut pieces: Vec<Piece> = Vec::new();
    for (f, face) in s.faces.iter().enumerate() {
        let mut local = vec![face.pos.to_vec()];
        for &(p, q) in &chords[f] {
            let mid = p.lerp(q, 0.5);
            let idx = local
                .iter()
                .position(|poly| inside_convex(poly, mid, eps))
                .ok_or(LayoutError::ChordOutsideFace { face: f })?;
            let (a, b) = split_convex(&local[idx], p, q, eps).ok_or(LayoutError::ChordOutsideFace { face: f })?;
            local[idx] = a;
            local.push(b);
        }
        pieces.extend(local.into_iter().map(|polygon| Piece { face: f, polygon }));
    }

    // Piece sides lying on each half-edge, as parameter intervals.
    let mut on_edge: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); s.halfedge_count()];
    for (pi, piece) in pieces.iter().enumerate() {
        let m = piece.polygon.len();
        for i in 0..m {
            let (u, w) = (piece.polygon[i], piece.polygon[(i + 1) % m]);
            if u.dist(w) <= eps {
                continue;
            }
            for le in 0..3 {
                let h = 3 * piece.face + le;
                let (a, b) = (s.tail(h), s.head(h));
                if point_segment_dist(u, a, b) <= eps && point_segment_dist(w, a, b) <= eps {
                    let (t0, t1) = (edge_param(s, h, u), edge_param(s, h, w));
                    on_edge[h].push((t0.min(t1), t0.max(t1), pi));
                }
            }
        }
    }
    let mut links = Vec::new();
    let tol_t = 1e-9;
    for h in 0..s.halfedge_count() {
        let t = s.twin(h);
        for &(a0, a1, pa) in &on_edge[h] {
            for &(b0, b1, pb) in &on_edge[t] {
                let (lo, hi) = (a0.max(1.0 - b1), a1.min(1.0 - b0));
                if hi - lo <= tol_t {
                    continue;
                }
                let covered = blocked[h].iter().any(|&(x0, x1)| x0 <= lo + tol_t && x1 >= hi - tol_t);
                if !covered {
                    links.push((pa, pb, h));
                }
            }
        }
    }

    let mut uf = UnionFind::<usize>::new(pieces.len());
    for &(a, b, _) in &links {
        uf.union(a, b);
    }
    let labels = uf.into_labeling();
    let mut roots: Vec<usize> = labels.clone();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() != 2 {
        return Err(LayoutError::Components { found: roots.len() });
    }
    // The half holding piece 0 (lowest face) comes first.
    let first = labels[0];
    let mut local_index = vec![usize::MAX; pieces.len()];
    let mut halves =
        [HalfSurface { pieces: Vec::new(), links: Vec::new() }, HalfSurface { pieces: Vec::new(), links: Vec::new() }];
    for (pi, piece) in pieces.into_iter().enumerate() {
        let side = usize::from(labels[pi] != first);
        local_index[pi] = halves[side].pieces.len();
        halves[side].pieces.push(piece);
    }
    for (a, b, h) in links {
        let side = usize::from(labels[a] != first);
        halves[side].links.push((local_index[a], local_index[b], h));
    }
    Ok(halves)
}

/// Lays a half out in the plane by breadth-first placement from its lowest-index face.
pub fn develop_half(s: &Surface, half: &HalfSurface, rim: &RimCandidate) -> Result<Development, LayoutError> {
    let m = half.pieces.len();
    let mut adj = vec![Vec::new(); m];
    for &(a, b, h) in &half.links {
        adj[a].push((b, h));
    }
    let root = (0..m).min_by_key(|&i| (half.pieces[i].face, i)).expect("halves are non-empty");
    let mut maps: Vec<Option<Rigid>> = vec![None; m];
    maps[root] = Some(Rigid::identity());
    let mut queue = VecDeque::from([root]);
    let mut discrepancy = 0.0f64;
    while let Some(a) = queue.pop_front() {
        let ma = maps[a].expect("queued pieces are placed");
        for &(b, h) in &adj[a] {
            // Twin chart → this chart → plane.
            let mb = s.transition(h).inverse().then(&ma);
            match maps[b] {
                None => {
                    maps[b] = Some(mb);
                    queue.push_back(b);
                }
                Some(existing) => {
                    for &p in &half.pieces[b].polygon {
                        discrepancy = discrepancy.max(existing.apply(p).dist(mb.apply(p)));
                    }
                }
            }
        }
    }
    let maps: Vec<Rigid> = maps.into_iter().map(|m| m.expect("halves are connected")).collect();

    let placed: Vec<Point> =
        half.pieces.iter().zip(&maps).flat_map(|(piece, map)| piece.polygon.iter().map(|&p| map.apply(p))).collect();
    let diam = diameter(&placed);
    let tol = 1e-7 * diam.max(1e-300);
    if discrepancy > tol {
        return Err(LayoutError::Inconsistent { worst: discrepancy, tol });
    }

    let eps = 1e-9 * scale_of(s);
    let mut vertices = Vec::with_capacity(rim.order.len());
    for &cone in &rim.order {
        let v = s.cone_vertex(cone);
        let images: Vec<Point> = half
            .pieces
            .iter()
            .zip(&maps)
            .flat_map(|(piece, map)| {
                let f = piece.face;
                (0..3)
                    .filter(move |&c| s.vertex(3 * f + c) == v)
                    .map(move |c| s.faces[f].pos[c])
                    .filter(|&corner| piece.polygon.iter().any(|&p| p.dist(corner) <= eps))
                    .map(move |corner| map.apply(corner))
            })
            .collect();
        if images.is_empty() {
            return Err(LayoutError::MissingVertex { cone });
        }
        let mean = images.iter().fold(Point::zero(), |acc, &p| acc + p) / images.len() as f64;
        let spread = images.iter().map(|p| p.dist(mean)).fold(0.0, f64::max);
        if spread > tol {
            return Err(LayoutError::VertexSpread { cone, spread });
        }
        vertices.push(mean);
    }
    Ok(Development { maps, vertices, area: half.area(), discrepancy })
}

/// Splits along the rim, develops both halves and checks they form one convex polygon.
pub fn reconstruct(s: &Surface, sigma: &ShortestPathSet, rim: &RimCandidate) -> Result<FlatPolyhedron, LayoutError> {
    let halves = split_surface(s, sigma, rim)?;
    let dev = [develop_half(s, &halves[0], rim)?, develop_half(s, &halves[1], rim)?];
    let total = s.area();
    let (a, b) = (dev[0].area, dev[1].area);
    if (a - b).abs() > 1e-9 * total || (a + b - total).abs() > 1e-9 * total {
        return Err(LayoutError::Area { a, b, total });
    }

    let oriented: Vec<f64> = dev.iter().map(|d| signed_area(&d.vertices)).collect();
    let (ccw, cw) = match (oriented[0] > 0.0, oriented[1] > 0.0) {
        (true, false) => (0, 1),
        (false, true) => (1, 0),
        _ => return Err(LayoutError::Orientation),
    };
    let poly = canonical_pose(&dev[ccw].vertices);
    let mirrored: Vec<Point> = dev[cw].vertices.iter().map(|p| Point::new(p.x, -p.y)).collect();
    let other = canonical_pose(&mirrored);
    let diam = diameter(&poly);
    let congruence_error = poly.iter().zip(&other).map(|(p, q)| p.dist(*q)).fold(0.0, f64::max);
    if congruence_error > 1e-7 * diam {
        return Err(LayoutError::NotCongruent { worst: congruence_error });
    }

    let n = poly.len();
    let eps_area = 1e-9 * diam * diam;
    let lengths = rim.lengths(sigma);
    let eps_angle = s.tolerances.angle;
    let mut interior_angles = Vec::with_capacity(n);
    let mut edge_lengths = Vec::with_capacity(n);
    for k in 0..n {
        let (prev, cur, next) = (poly[(k + n - 1) % n], poly[k], poly[(k + 1) % n]);
        let cross = orient(prev, cur, next);
        if cross < -eps_area {
            return Err(LayoutError::NotConvex { vertex: k, cross });
        }
        let developed = cur.dist(next);
        if (developed - lengths[k]).abs() > 1e-9 * lengths[k].max(1.0) {
            return Err(LayoutError::EdgeLength { edge: k, developed, rim: lengths[k] });
        }
        edge_lengths.push(developed);
        let angle = interior_angle(prev, cur, next);
        let expected = 0.5 * s.cones[rim.order[k]].angle;
        if (angle - expected).abs() > eps_angle {
            return Err(LayoutError::Angle { vertex: k, angle, expected });
        }
        interior_angles.push(angle);
    }
    Ok(FlatPolyhedron {
        polygon: poly,
        cones: rim.order.clone(),
        half_areas: [dev[ccw].area, dev[cw].area],
        edge_lengths,
        interior_angles,
        congruence_error,
    })
}

/// First vertex at the origin, first edge along +x.
pub fn canonical_pose(poly: &[Point]) -> Vec<Point> {
    if poly.len() < 2 {
        return poly.to_vec();
    }
    let m = Rigid::from_segments(poly[0], poly[1], Point::zero(), Point::new(1.0, 0.0));
    poly.iter().map(|&p| m.apply(p)).collect()
}

pub fn diameter(points: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// Parameter of `p` along half-edge `h`, from its tail.
fn edge_param(s: &Surface, h: usize, p: Point) -> f64 {
    let (a, b) = (s.tail(h), s.head(h));
    ((p - a).dot(b - a) / (b - a).norm_sq()).clamp(0.0, 1.0)
}

fn inside_convex(poly: &[Point], p: Point, eps: f64) -> bool {
    let m = poly.len();
    (0..m).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        let len = a.dist(b);
        len <= eps || orient(a, b, p) / len >= -eps
    })
}

/// Splits a convex polygon along the chord `pq`, whose endpoints lie on its boundary.
fn split_convex(poly: &[Point], p: Point, q: Point, eps: f64) -> Option<(Vec<Point>, Vec<Point>)> {
    let mut ring = poly.to_vec();
    let ip = insert_on_boundary(&mut ring, p, eps)?;
    let iq = insert_on_boundary(&mut ring, q, eps)?;
    // Inserting q may shift p's index.
    let ip = if iq <= ip && ring[ip].dist(p) > eps { ip + 1 } else { ip };
    let m = ring.len();
    let chain = |from: usize, to: usize| {
        let mut out = vec![ring[from]];
        let mut k = from;
        while k != to {
            k = (k + 1) % m;
            out.push(ring[k]);
        }
        out
    };
    let (a, b) = (chain(ip, iq), chain(iq, ip));
    if a.len() < 3 || b.len() < 3 {
        return None;
    }
    Some((a, b))
}

fn insert_on_boundary(ring: &mut Vec<Point>, p: Point, eps: f64) -> Option<usize> {
    if let Some(i) = ring.iter().position(|v| v.dist(p) <= eps) {
        return Some(i);
    }
    let m = ring.len();
    let i = (0..m).find(|&i| point_segment_dist(p, ring[i], ring[(i + 1) % m]) <= eps)?;
    ring.insert(i + 1, p);
    Some(i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_square_through_opposite_midpoints() {
        let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        let (a, b) = split_convex(&sq, Point::new(0.5, 0.0), Point::new(0.5, 1.0), 1e-12).unwrap();
        assert!((signed_area(&a) - 0.5).abs() < 1e-15);
        assert!((signed_area(&b) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn split_triangle_from_corner() {
        let tri = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 2.0)];
        let (a, b) = split_convex(&tri, Point::new(0.0, 0.0), Point::new(1.0, 1.0), 1e-12).unwrap();
        assert_eq!(a.len() + b.len(), 6);
        assert!((signed_area(&a) + signed_area(&b) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_pose_puts_first_edge_on_x_axis() {
        let poly = [Point::new(3.0, 1.0), Point::new(3.0, 3.0), Point::new(1.0, 2.0)];
        let c = canonical_pose(&poly);
        assert!(c[0].norm() < 1e-15);
        assert!((c[1].x - 2.0).abs() < 1e-15 && c[1].y.abs() < 1e-15);
        assert!(signed_area(&c) > 0.0);
    }
}
