use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{RefinedGluing, TilingDefect};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingVerdict {
    pub pass: bool,
    pub defects: Vec<TilingDefect>,
    /// Boundary edges left without a partner.
    pub unpaired_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffendingClass {
    pub class: usize,
    pub angle: f64,
    /// `(polygon id, boundary parameter)` of every member corner.
    pub members: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleVerdict {
    pub pass: bool,
    pub max_angle: f64,
    pub offending: Vec<OffendingClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologyVerdict {
    pub pass: bool,
    pub components: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    /// Classes whose corners do not close up into a single cycle.
    pub non_manifold_classes: Vec<usize>,
}

/// The three gluing conditions, judged independently.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Perimeters are matched exactly once everywhere.
    pub perimeter_matching: TilingVerdict,
    /// No point is surrounded by more than 2π.
    pub angle_bound: AngleVerdict,
    /// The quotient is a connected closed surface with Euler characteristic 2.
    pub sphere_topology: TopologyVerdict,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.perimeter_matching.pass && self.angle_bound.pass && self.sphere_topology.pass
    }
}

pub fn check_alexandrov(r: &RefinedGluing) -> ValidationReport {
    ValidationReport { perimeter_matching: tiling(r), angle_bound: angles(r), sphere_topology: topology(r) }
}

fn tiling(r: &RefinedGluing) -> TilingVerdict {
    let unpaired_edges = r.pairing.iter().filter(|p| p.is_none()).count();
    TilingVerdict { pass: r.defects.is_empty() && unpaired_edges == 0, defects: r.defects.clone(), unpaired_edges }
}

fn angles(r: &RefinedGluing) -> AngleVerdict {
    let limit = std::f64::consts::TAU + r.tolerances.angle;
    let offending: Vec<OffendingClass> = r
        .classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.angle > limit)
        .map(|(i, c)| OffendingClass {
            class: i,
            angle: c.angle,
            members: c
                .members
                .iter()
                .map(|&g| {
                    let (p, k) = r.locate(g);
                    (r.polygons[p].id.clone(), r.polygons[p].params[k])
                })
                .collect(),
        })
        .collect();
    let max_angle = r.classes.iter().map(|c| c.angle).fold(0.0, f64::max);
    AngleVerdict { pass: offending.is_empty(), max_angle, offending }
}

fn topology(r: &RefinedGluing) -> TopologyVerdict {
    let faces = r.polygons.len();
    let mut uf = UnionFind::<usize>::new(faces);
    for (e, partner) in r.pairing.iter().enumerate() {
        if let Some(f) = partner {
            uf.union(r.locate(e).0, r.locate(*f).0);
        }
    }
    let labels = uf.into_labeling();
    let mut roots: Vec<usize> = labels.clone();
    roots.sort_unstable();
    roots.dedup();
    let components = roots.len();

    // Walk each class's corners: the corner glued across the incoming edge is the next
    // one counterclockwise. A manifold point gives exactly one closed cycle.
    let total = r.vertex_count();
    let mut seen = vec![false; total];
    let mut cycles = vec![0usize; r.classes.len()];
    let mut open = vec![false; r.classes.len()];
    for start in 0..total {
        if seen[start] {
            continue;
        }
        // Rewind to the beginning of an open chain, if this corner sits on one.
        let mut first = start;
        loop {
            match backward(r, first) {
                Some(p) if p != start && !seen[p] => first = p,
                _ => break,
            }
        }
        let mut cur = first;
        loop {
            seen[cur] = true;
            match forward(r, cur) {
                Some(nx) if nx == first => break,
                Some(nx) if !seen[nx] => cur = nx,
                _ => {
                    open[r.class_of[start]] = true;
                    break;
                }
            }
        }
        cycles[r.class_of[start]] += 1;
    }
    let non_manifold_classes: Vec<usize> = (0..r.classes.len()).filter(|&c| cycles[c] != 1 || open[c]).collect();

    let vertices = r.classes.len();
    let edges = r.quotient_edge_count();
    let euler_characteristic = vertices as i64 - edges as i64 + faces as i64;
    TopologyVerdict {
        pass: components == 1 && euler_characteristic == 2 && non_manifold_classes.is_empty(),
        components,
        vertices,
        edges,
        faces,
        euler_characteristic,
        non_manifold_classes,
    }
}

/// Next corner counterclockwise around the same point: across the incoming edge.
fn forward(r: &RefinedGluing, corner: usize) -> Option<usize> {
    let incoming = r.prev(corner);
    r.pairing[incoming]
}

/// Inverse of [`forward`]: across the outgoing edge.
fn backward(r: &RefinedGluing, corner: usize) -> Option<usize> {
    r.pairing[corner].map(|f| r.next(f))
}
