//! Exact shortest paths between cone points, intrinsic to the surface.
//!
//! [`shortest_paths_from`] propagates visibility windows across faces from one source;
//! [`oracle_shortest_path`] enumerates unfolded face strips for a single pair and is
//! kept independent of the window code so the two can be checked against each other.

mod oracle;
mod window;

pub use oracle::{oracle_shortest_path, OracleResult};
pub use window::shortest_paths_from;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::surface::Surface;
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("cone {target} unreachable from cone {origin}")]
    Unreachable { origin: usize, target: usize },
    #[error("asymmetric distances between cones {i} and {j}: {forward} vs {backward}")]
    SymmetryViolation { i: usize, j: usize, forward: f64, backward: f64 },
    #[error("window propagation from cone {origin} exceeded {limit} windows")]
    WindowBudget { origin: usize, limit: usize },
    #[error("no valid unfolding found within {cap} face crossings")]
    CapExceeded { cap: usize },
    #[error("{0} is not a cone index")]
    NotACone(usize),
}

/// Straight piece of a path inside one face, in that face's chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub face: usize,
    pub from: Point,
    pub to: Point,
}

/// A shortest path between two cone points (given as cone indices).
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    pub source: usize,
    pub target: usize,
    pub length: f64,
    pub trace: Vec<TraceStep>,
    /// Angular coordinate of the first segment around the source.
    pub departure: f64,
    /// Angular coordinate, around the target, of the direction back along the path.
    pub arrival: f64,
}

impl GeodesicPath {
    pub fn faces(&self) -> Vec<usize> {
        self.trace.iter().map(|s| s.face).collect()
    }

    pub fn trace_length(&self) -> f64 {
        self.trace.iter().map(|s| s.from.dist(s.to)).sum()
    }
}

/// Σ: every tied shortest path for every ordered pair of cone points.
#[derive(Clone, Debug)]
pub struct ShortestPathSet {
    n: usize,
    paths: Vec<GeodesicPath>,
    by_pair: Vec<Vec<usize>>,
    /// Per source, path indices sorted by departure angle.
    outgoing: Vec<Vec<usize>>,
}

impl ShortestPathSet {
    /// Assembles per-source results, enforcing distance symmetry.
    pub fn from_paths(n: usize, paths: Vec<GeodesicPath>, tie: f64) -> Result<Self, GeodesicError> {
        let mut by_pair = vec![Vec::new(); n * n];
        let mut outgoing = vec![Vec::new(); n];
        for (k, p) in paths.iter().enumerate() {
            by_pair[p.source * n + p.target].push(k);
            outgoing[p.source].push(k);
        }
        for out in &mut outgoing {
            out.sort_by(|&a, &b| paths[a].departure.total_cmp(&paths[b].departure));
        }
        let set = Self { n, paths, by_pair, outgoing };
        for i in 0..n {
            for j in (i + 1)..n {
                let (forward, backward) = (set.min_length(i, j), set.min_length(j, i));
                if !(forward.is_finite() && backward.is_finite()) {
                    let (origin, target) = if forward.is_finite() { (j, i) } else { (i, j) };
                    return Err(GeodesicError::Unreachable { origin, target });
                }
                if (forward - backward).abs() > tie.max(1e-9) * forward.max(backward) {
                    return Err(GeodesicError::SymmetryViolation { i, j, forward, backward });
                }
            }
        }
        Ok(set)
    }

    pub fn cone_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn all(&self) -> &[GeodesicPath] {
        &self.paths
    }

    pub fn path(&self, k: usize) -> &GeodesicPath {
        &self.paths[k]
    }

    /// Indices of the tied shortest paths from cone `i` to cone `j`.
    pub fn pair(&self, i: usize, j: usize) -> &[usize] {
        &self.by_pair[i * self.n + j]
    }

    pub fn min_length(&self, i: usize, j: usize) -> f64 {
        self.pair(i, j).iter().map(|&k| self.paths[k].length).fold(f64::INFINITY, f64::min)
    }

    /// Paths leaving cone `i`, by increasing departure angle.
    pub fn outgoing(&self, i: usize) -> &[usize] {
        &self.outgoing[i]
    }

    /// One JSON object per path: endpoints, length, faces crossed and angles.
    pub fn dump(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            source: usize,
            target: usize,
            length: f64,
            faces: Vec<usize>,
            departure: f64,
            arrival: f64,
            trace: &'a [TraceStep],
        }
        let rows: Vec<Row> = (0..self.n)
            .flat_map(|i| self.outgoing[i].iter())
            .map(|&k| {
                let p = &self.paths[k];
                Row {
                    source: p.source,
                    target: p.target,
                    length: p.length,
                    faces: p.faces(),
                    departure: p.departure,
                    arrival: p.arrival,
                    trace: &p.trace,
                }
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("path dump serializes")
    }
}

/// Σ via window propagation, one source per task.
pub fn all_pairs(s: &Surface) -> Result<ShortestPathSet, GeodesicError> {
    let per_source: Vec<Result<Vec<GeodesicPath>, GeodesicError>> =
        (0..s.cones.len()).into_par_iter().map(|i| shortest_paths_from(s, i)).collect();
    let mut paths = Vec::new();
    for r in per_source {
        paths.extend(r?);
    }
    ShortestPathSet::from_paths(s.cones.len(), paths, s.tolerances.tie)
}

/// Σ assembled from the exhaustive oracle, one ordered pair per task.
pub fn all_pairs_oracle(s: &Surface, cap: usize) -> Result<ShortestPathSet, GeodesicError> {
    let n = s.cones.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let per_pair: Vec<Result<OracleResult, GeodesicError>> =
        pairs.par_iter().map(|&(i, j)| oracle_shortest_path(s, i, j, cap)).collect();
    let mut paths = Vec::new();
    for r in per_pair {
        paths.extend(r?.paths);
    }
    ShortestPathSet::from_paths(n, paths, s.tolerances.tie)
}

/// Default oracle depth cap: four crossings per face.
pub fn default_depth_cap(s: &Surface) -> usize {
    4 * s.face_count()
}

/// Upper bounds on the distance from `source` (a quotient vertex) to every vertex,
/// along mesh edges.
pub(crate) fn edge_graph_bounds(s: &Surface, source: usize) -> Vec<f64> {
    let mut g = UnGraph::<(), f64>::with_capacity(s.vertex_count(), s.edge_count());
    for _ in 0..s.vertex_count() {
        g.add_node(());
    }
    for h in 0..s.halfedge_count() {
        if h < s.twin(h) {
            let (u, v) = (s.vertex(h), s.vertex(s.twin(h)));
            g.add_edge(NodeIndex::new(u), NodeIndex::new(v), s.edge_length(h));
        }
    }
    let dist = dijkstra(&g, NodeIndex::new(source), None, |e| *e.weight());
    let mut out = vec![f64::INFINITY; s.vertex_count()];
    for (node, d) in dist {
        out[node.index()] = d;
    }
    out
}

/// Whether two angular coordinates around a vertex of total angle `theta` agree within `eps`.
pub(crate) fn same_angle(a: f64, b: f64, theta: f64, eps: f64) -> bool {
    let d = (a - b).abs();
    d <= eps || (theta - d).abs() <= eps
}

/// Removes paths that repeat an earlier one's target, length and departure.
pub(crate) fn dedupe(paths: &mut Vec<GeodesicPath>, s: &Surface) {
    let tie = s.tolerances.tie;
    let mut kept: Vec<GeodesicPath> = Vec::with_capacity(paths.len());
    for p in paths.drain(..) {
        let theta = s.cones[p.source].angle;
        let dup = kept.iter().any(|q| {
            q.target == p.target
                && (q.length - p.length).abs() <= tie * p.length.max(q.length)
                && same_angle(q.departure, p.departure, theta, 1e-9)
        });
        if !dup {
            kept.push(p);
        }
    }
    *paths = kept;
}
