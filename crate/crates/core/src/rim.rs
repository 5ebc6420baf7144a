//! Search for the rim: a simple closed path through every cone point, made of shortest
//! paths, that bisects the total angle at each cone point.

use std::fmt;

use serde::Serialize;

use crate::geodesic::ShortestPathSet;
use crate::geom::{point_segment_dist, segment_distance, wrap};
use crate::surface::Surface;
use crate::Point;

/// A closed bisecting path visiting every cone point once.
#[derive(Clone, Debug, PartialEq)]
pub struct RimCandidate {
    /// Cone indices in rim order; `order[0]` is the start.
    pub order: Vec<usize>,
    /// Σ path index of the segment from `order[k]` to `order[k + 1]` (cyclically).
    pub segments: Vec<usize>,
    /// Angle at `order[k]` of the segment arriving there.
    pub arrivals: Vec<f64>,
    /// Angle at `order[k]` of the segment leaving there.
    pub departures: Vec<f64>,
}

impl RimCandidate {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn lengths(&self, sigma: &ShortestPathSet) -> Vec<f64> {
        self.segments.iter().map(|&k| sigma.path(k).length).collect()
    }

    /// Same cycle up to rotation and reversal.
    pub fn same_cycle(&self, other: &[usize]) -> bool {
        same_cycle(&self.order, other)
    }
}

/// Whether two vertex cycles agree up to rotation and reversal.
pub fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let Some(shift) = b.iter().position(|&x| Some(&x) == a.first()) else { return n == 0 };
    let forward = (0..n).all(|k| a[k] == b[(shift + k) % n]);
    let backward = (0..n).all(|k| a[k] == b[(shift + n - k) % n]);
    forward || backward
}

/// Whether the gap between `arrival` and `departure` is half of `theta`, within `eps`.
pub fn bisects(theta: f64, arrival: f64, departure: f64, eps: f64) -> bool {
    ((departure - arrival).abs() - 0.5 * theta).abs() <= eps
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    NoBisect,
    PrematureLoop,
    NotSimple,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::NoBisect => "no-bisect",
            Rejection::PrematureLoop => "premature-loop",
            Rejection::NotSimple => "not-simple",
        })
    }
}

/// One step of the search, for the trace log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEvent {
    /// First segment `(v_1, v_j)` and its tie index among the paths between them.
    pub start: (usize, usize),
    pub tie: usize,
    /// Vertex the path currently ends at.
    pub at: usize,
    /// Targets of the bisecting extensions found here.
    pub candidates: Vec<usize>,
    pub rejection: Option<Rejection>,
    pub closed: bool,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cands: Vec<String> = self.candidates.iter().map(|c| format!("v{c}")).collect();
        write!(
            f,
            "start (v{},v{})#{} at v{} candidates [{}]",
            self.start.0,
            self.start.1,
            self.tie,
            self.at,
            cands.join(",")
        )?;
        match (self.rejection, self.closed) {
            (Some(r), _) => write!(f, " reject {r}"),
            (None, true) => write!(f, " closed"),
            (None, false) => write!(f, " extend"),
        }
    }
}

/// Bisecting continuations of a partial rim.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Extension {
    /// Paths to unvisited vertices.
    pub next: Vec<usize>,
    /// Paths back to the start once every vertex has been visited.
    pub closing: Vec<usize>,
    /// Paths back to an already visited vertex too early.
    pub premature: Vec<usize>,
}

impl Extension {
    pub fn is_empty(&self) -> bool {
        self.next.is_empty() && self.closing.is_empty() && self.premature.is_empty()
    }
}

/// Bisecting extensions at `current` for a path arriving at angle `arrival`.
///
/// The outgoing paths are sorted by departure, so the ones near `arrival + θ/2` (mod θ)
/// are found by binary search and a scan of the `eps` window on either side.
pub fn extend_path(
    sigma: &ShortestPathSet,
    s: &Surface,
    current: usize,
    arrival: f64,
    visited: &[bool],
    start: usize,
    eps: f64,
) -> Extension {
    let theta = s.cones[current].angle;
    let out = sigma.outgoing(current);
    let target = wrap(arrival + 0.5 * theta, theta);
    let mut ranges = vec![(target - eps, target + eps)];
    if target - eps < 0.0 {
        ranges.push((target - eps + theta, theta));
    }
    if target + eps >= theta {
        ranges.push((0.0, target + eps - theta));
    }
    let mut hits: Vec<usize> = Vec::new();
    for (lo, hi) in ranges {
        let from = out.partition_point(|&k| sigma.path(k).departure < lo);
        for &k in &out[from..] {
            if sigma.path(k).departure > hi {
                break;
            }
            if bisects(theta, arrival, sigma.path(k).departure, eps) && !hits.contains(&k) {
                hits.push(k);
            }
        }
    }
    hits.sort_unstable_by(|&a, &b| sigma.path(a).target.cmp(&sigma.path(b).target).then(a.cmp(&b)));

    let all_visited = visited.iter().all(|&v| v);
    let mut ext = Extension::default();
    for k in hits {
        let t = sigma.path(k).target;
        if !visited[t] {
            ext.next.push(k);
        } else if t == start && all_visited {
            ext.closing.push(k);
        } else {
            ext.premature.push(k);
        }
    }
    ext
}

/// Outcome of [`find_rim`].
#[derive(Clone, Debug)]
pub struct RimSearch {
    pub rim: Option<RimCandidate>,
    /// Start segments `(v_1, v_j)`, ties included, that were searched.
    pub starts_explored: usize,
    pub trace: Vec<TraceEvent>,
}

struct Search<'a> {
    s: &'a Surface,
    sigma: &'a ShortestPathSet,
    start: usize,
    eps: f64,
    trace: Vec<TraceEvent>,
    label: ((usize, usize), usize),
}

/// Depth-first search from every shortest path leaving cone `first`, in order of target
/// index then tie index; returns the first closed, bisecting, simple candidate.
pub fn find_rim(s: &Surface, sigma: &ShortestPathSet, first: usize) -> RimSearch {
    let n = s.cones.len();
    let mut search =
        Search { s, sigma, start: first, eps: s.tolerances.angle, trace: Vec::new(), label: ((first, first), 0) };
    let mut starts_explored = 0;
    for j in (0..n).filter(|&j| j != first) {
        for (tie, &k) in sigma.pair(first, j).iter().enumerate() {
            starts_explored += 1;
            search.label = ((first, j), tie);
            let mut visited = vec![false; n];
            visited[first] = true;
            visited[j] = true;
            let mut path = vec![k];
            if let Some(rim) = search.dfs(&mut path, &mut visited) {
                return RimSearch { rim: Some(rim), starts_explored, trace: search.trace };
            }
        }
    }
    RimSearch { rim: None, starts_explored, trace: search.trace }
}

impl Search<'_> {
    fn event(&mut self, at: usize, candidates: Vec<usize>, rejection: Option<Rejection>, closed: bool) {
        let ((a, b), tie) = self.label;
        self.trace.push(TraceEvent { start: (a, b), tie, at, candidates, rejection, closed });
    }

    fn dfs(&mut self, path: &mut Vec<usize>, visited: &mut Vec<bool>) -> Option<RimCandidate> {
        let last = self.sigma.path(*path.last().expect("path starts with one segment"));
        let (cur, arrival) = (last.target, last.arrival);
        let ext = extend_path(self.sigma, self.s, cur, arrival, visited, self.start, self.eps);
        let targets = |ks: &[usize]| ks.iter().map(|&k| self.sigma.path(k).target).collect::<Vec<_>>();
        if ext.is_empty() {
            self.event(cur, Vec::new(), Some(Rejection::NoBisect), false);
            return None;
        }
        if !ext.premature.is_empty() {
            let t = targets(&ext.premature);
            self.event(cur, t, Some(Rejection::PrematureLoop), false);
        }
        for &k in &ext.closing {
            let closing = self.sigma.path(k);
            let first = self.sigma.path(path[0]);
            let theta = self.s.cones[self.start].angle;
            if !bisects(theta, closing.arrival, first.departure, self.eps) {
                self.event(cur, vec![self.start], Some(Rejection::NoBisect), false);
                continue;
            }
            let mut segments = path.clone();
            segments.push(k);
            let cand = candidate(self.sigma, &segments);
            if is_simple(&cand, self.s, self.sigma) {
                self.event(cur, vec![self.start], None, true);
                return Some(cand);
            }
            self.event(cur, vec![self.start], Some(Rejection::NotSimple), false);
        }
        if !ext.next.is_empty() {
            let t = targets(&ext.next);
            self.event(cur, t, None, false);
        }
        for &k in &ext.next {
            let t = self.sigma.path(k).target;
            visited[t] = true;
            path.push(k);
            if let Some(rim) = self.dfs(path, visited) {
                return Some(rim);
            }
            path.pop();
            visited[t] = false;
        }
        None
    }
}

/// Assembles a candidate from consecutive Σ paths forming a cycle.
pub fn candidate(sigma: &ShortestPathSet, segments: &[usize]) -> RimCandidate {
    let n = segments.len();
    let order: Vec<usize> = segments.iter().map(|&k| sigma.path(k).source).collect();
    let departures = segments.iter().map(|&k| sigma.path(k).departure).collect();
    let arrivals = (0..n).map(|i| sigma.path(segments[(i + n - 1) % n]).arrival).collect();
    RimCandidate { order, segments: segments.to_vec(), arrivals, departures }
}

/// No two rim segments meet except consecutive ones at their shared cone point.
///
/// Every trace piece is collected in the face it lies in (pieces running along an edge
/// are recorded in both adjacent faces) and pieces are tested pairwise in each face's chart.
pub fn is_simple(c: &RimCandidate, s: &Surface, sigma: &ShortestPathSet) -> bool {
    let n = c.order.len();
    let scale = c.segments.iter().map(|&k| sigma.path(k).length).fold(0.0, f64::max);
    let eps = 1e-9 * scale.max(1e-300);
    let mut per_face: Vec<Vec<(usize, Point, Point)>> = vec![Vec::new(); s.face_count()];
    for (seg, &k) in c.segments.iter().enumerate() {
        for step in &sigma.path(k).trace {
            if step.from.dist(step.to) <= eps {
                continue;
            }
            per_face[step.face].push((seg, step.from, step.to));
            for le in 0..3 {
                let h = 3 * step.face + le;
                let (a, b) = (s.tail(h), s.head(h));
                if point_segment_dist(step.from, a, b) <= eps && point_segment_dist(step.to, a, b) <= eps {
                    let t = s.transition(h);
                    per_face[s.twin(h) / 3].push((seg, t.apply(step.from), t.apply(step.to)));
                }
            }
        }
    }
    for (f, pieces) in per_face.iter().enumerate() {
        for x in 0..pieces.len() {
            for y in (x + 1)..pieces.len() {
                let (k, a, b) = pieces[x];
                let (l, p, q) = pieces[y];
                if k == l || segment_distance(a, b, p, q) > eps {
                    continue;
                }
                let shared = if (k + 1) % n == l {
                    Some(c.order[l])
                } else if (l + 1) % n == k {
                    Some(c.order[k])
                } else {
                    None
                };
                let Some(v) = shared else { return false };
                if !touch_only_at_vertex(s, f, s.cone_vertex(v), (a, b), (p, q), eps) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether two touching pieces in face `f` meet only at a corner of `f` that is vertex
/// `v`, each having that corner as an endpoint, and leave it in different directions.
fn touch_only_at_vertex(s: &Surface, f: usize, v: usize, one: (Point, Point), two: (Point, Point), eps: f64) -> bool {
    (0..3).filter(|&c| s.vertex(3 * f + c) == v).any(|c| {
        let x = s.faces[f].pos[c];
        let far = |(a, b): (Point, Point)| {
            if a.dist(x) <= eps {
                Some(b)
            } else if b.dist(x) <= eps {
                Some(a)
            } else {
                None
            }
        };
        match (far(one), far(two)) {
            (Some(u), Some(w)) => {
                let (u, w) = ((u - x).normalized(), (w - x).normalized());
                u.cross(w).abs() > 1e-9 || u.dot(w) < 0.0
            }
            _ => false,
        }
    })
}
