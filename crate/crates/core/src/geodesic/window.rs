//! Best-first window propagation from one cone point.
//!
//! A window is the wedge of straight directions from an image of the source that reach
//! a face through a known sequence of edges. Wedges split at the opposite vertex of every
//! face they enter. Flat vertices let a path continue straight through them; cone
//! vertices stop it. Parts of an edge that are reached faster through one of the edge's
//! endpoints are trimmed, which keeps the number of windows per edge small.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

use super::{dedupe, edge_graph_bounds, same_angle, GeodesicError, GeodesicPath, TraceStep};
use crate::geom::{line_intersection, point_segment_dist, wrap};
use crate::surface::{Direction, Surface};
use crate::{Point, Rigid};

/// Sine slack under which a direction counts as passing through a vertex.
const DIR_EPS: f64 = 1e-11;
const WINDOW_LIMIT: usize = 20_000_000;
const ROOT: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
enum Entry {
    /// Leaves the given corner of the face (source corner, or a flat vertex passed straight).
    Corner(usize),
    /// Crosses into the face through the given local edge.
    Edge(usize),
}

#[derive(Clone, Copy, Debug)]
struct Window {
    face: usize,
    entry: Entry,
    /// Image of the source in this face's chart.
    src: Point,
    lo: Point,
    hi: Point,
    /// An open side passes through a mesh vertex and excludes everything behind it.
    lo_open: bool,
    hi_open: bool,
    ray: bool,
    dist: f64,
    parent: usize,
    to_parent: Rigid,
}

struct Hit {
    cone: usize,
    window: usize,
    corner: usize,
    length: f64,
}

struct Propagator<'a> {
    s: &'a Surface,
    source: usize,
    source_vertex: usize,
    bound_to: Vec<f64>,
    best: Vec<f64>,
    found: usize,
    arena: Vec<Window>,
    heap: BinaryHeap<(Reverse<OrderedFloat<f64>>, usize)>,
    hits: Vec<Hit>,
    spawned: Vec<Vec<(f64, f64)>>,
    tie: f64,
    slack: f64,
}

/// Every tied shortest path from cone `source` to each other cone point.
pub fn shortest_paths_from(s: &Surface, source: usize) -> Result<Vec<GeodesicPath>, GeodesicError> {
    if source >= s.cones.len() {
        return Err(GeodesicError::NotACone(source));
    }
    let sv = s.cone_vertex(source);
    let scale = s.faces.iter().flat_map(|f| f.pos).fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs())).max(1.0);
    let mut bound_to = edge_graph_bounds(s, sv);
    bound_to[sv] = 0.0;
    let mut p = Propagator {
        s,
        source,
        source_vertex: sv,
        bound_to,
        best: vec![f64::INFINITY; s.cones.len()],
        found: 0,
        arena: Vec::new(),
        heap: BinaryHeap::new(),
        hits: Vec::new(),
        spawned: vec![Vec::new(); s.vertex_count()],
        tie: s.tolerances.tie,
        slack: 1e-12 * scale,
    };
    for &h in s.fan(sv) {
        let (f, i) = (h / 3, h % 3);
        let pos = s.faces[f].pos;
        let a = pos[i];
        p.push(Window {
            face: f,
            entry: Entry::Corner(i),
            src: a,
            lo: (pos[(i + 1) % 3] - a).normalized(),
            hi: (pos[(i + 2) % 3] - a).normalized(),
            lo_open: true,
            hi_open: true,
            ray: false,
            dist: 0.0,
            parent: ROOT,
            to_parent: Rigid::identity(),
        });
    }
    while let Some((Reverse(OrderedFloat(dist)), idx)) = p.heap.pop() {
        if dist > p.bound() {
            break;
        }
        if p.arena.len() > WINDOW_LIMIT {
            return Err(GeodesicError::WindowBudget { origin: source, limit: WINDOW_LIMIT });
        }
        p.process(idx);
    }
    p.finish()
}

impl Propagator<'_> {
    fn bound(&self) -> f64 {
        if self.found + 1 < self.s.cones.len() {
            return f64::INFINITY;
        }
        let worst = self.best.iter().copied().filter(|b| b.is_finite()).fold(0.0, f64::max);
        worst * (1.0 + self.tie) + self.slack
    }

    fn push(&mut self, w: Window) {
        let idx = self.arena.len();
        self.heap.push((Reverse(OrderedFloat(w.dist)), idx));
        self.arena.push(w);
    }

    fn process(&mut self, idx: usize) {
        let w = self.arena[idx];
        let pos = self.s.faces[w.face].pos;
        match w.entry {
            Entry::Corner(j) if w.parent == ROOT => {
                self.vertex_event(idx, (j + 1) % 3);
                self.vertex_event(idx, (j + 2) % 3);
                self.cross(idx, (j + 1) % 3, w.lo, w.hi, true, true);
            }
            Entry::Corner(j) => {
                let d = w.lo;
                let e1 = (pos[(j + 1) % 3] - pos[j]).normalized();
                let e2 = (pos[(j + 2) % 3] - pos[j]).normalized();
                if e1.cross(d).abs() <= DIR_EPS && e1.dot(d) > 0.0 {
                    self.vertex_event(idx, (j + 1) % 3);
                } else if e2.cross(d).abs() <= DIR_EPS && e2.dot(d) > 0.0 {
                    self.vertex_event(idx, (j + 2) % 3);
                } else {
                    self.cross(idx, (j + 1) % 3, d, d, false, false);
                }
            }
            Entry::Edge(e) => {
                let c = (e + 2) % 3;
                let uc = (pos[c] - w.src).normalized();
                if w.ray {
                    let side = w.lo.cross(uc);
                    if side.abs() <= DIR_EPS {
                        self.vertex_event(idx, c);
                    } else if side > 0.0 {
                        self.cross(idx, (e + 1) % 3, w.lo, w.lo, false, false);
                    } else {
                        self.cross(idx, c, w.lo, w.lo, false, false);
                    }
                    return;
                }
                let s_lo = w.lo.cross(uc);
                let s_hi = uc.cross(w.hi);
                let on_lo = s_lo.abs() <= DIR_EPS;
                let on_hi = s_hi.abs() <= DIR_EPS;
                let inside = s_lo >= -DIR_EPS && s_hi >= -DIR_EPS;
                if inside && !(on_lo && w.lo_open) && !(on_hi && w.hi_open) {
                    self.vertex_event(idx, c);
                }
                if s_lo > DIR_EPS && s_hi > DIR_EPS {
                    self.cross(idx, (e + 1) % 3, w.lo, uc, w.lo_open, true);
                    self.cross(idx, c, uc, w.hi, true, w.hi_open);
                } else if s_lo <= DIR_EPS {
                    self.cross(idx, c, w.lo, w.hi, w.lo_open || on_lo, w.hi_open);
                } else {
                    self.cross(idx, (e + 1) % 3, w.lo, w.hi, w.lo_open, w.hi_open || on_hi);
                }
            }
        }
    }

    /// Sends the part of window `idx` bounded by `lo..hi` across local edge `le`.
    fn cross(&mut self, idx: usize, le: usize, lo: Point, hi: Point, lo_open: bool, hi_open: bool) {
        let w = self.arena[idx];
        let s = self.s;
        let h = 3 * w.face + le;
        let (a, b) = (s.tail(h), s.head(h));
        let len = a.dist(b);
        let param = |dir: Point| match line_intersection(w.src, dir, a, b) {
            Some((_, t)) => t.clamp(0.0, 1.0),
            None => {
                if dir.dot(b - a) > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let ray = lo == hi;
        let (mut t0, mut t1) = (param(lo), param(hi));
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        let (mut lo, mut hi, mut lo_open, mut hi_open) = (lo, hi, lo_open, hi_open);

        // Trim points reached faster by going through an endpoint of the edge.
        let k = 1.0 + self.tie;
        let (du, dv) = (self.bound_to[s.vertex(h)], self.bound_to[s.vertex(Surface::next(h))]);
        let slack = self.slack;
        let g = |t: f64| w.src.dist(a.lerp(b, t));
        let via_u = |t: f64| g(t) - k * (du + t * len) - slack;
        let via_v = |t: f64| g(t) - k * (dv + (1.0 - t) * len) - slack;
        if ray {
            if via_u(t0) > 0.0 || via_v(t0) > 0.0 {
                return;
            }
        } else {
            if du.is_finite() && via_u(t0) > 0.0 {
                if via_u(t1) > 0.0 {
                    return;
                }
                t0 = root(via_u, t0, t1);
                lo = (a.lerp(b, t0) - w.src).normalized();
                lo_open = false;
            }
            if dv.is_finite() && via_v(t1) > 0.0 {
                if via_v(t0) > 0.0 {
                    return;
                }
                t1 = root(|t| -via_v(t), t0, t1);
                hi = (a.lerp(b, t1) - w.src).normalized();
                hi_open = false;
            }
            if lo.cross(hi) <= 1e-15 {
                return;
            }
        }
        let dist = point_segment_dist(w.src, a.lerp(b, t0), a.lerp(b, t1)).max(w.dist);
        if dist > self.bound() {
            return;
        }
        let tw = s.twin(h);
        let t = s.transition(h);
        self.push(Window {
            face: tw / 3,
            entry: Entry::Edge(tw % 3),
            src: t.apply(w.src),
            lo: t.apply_vec(lo),
            hi: t.apply_vec(hi),
            lo_open,
            hi_open,
            ray,
            dist,
            parent: idx,
            to_parent: t.inverse(),
        });
    }

    /// The straight segment of window `idx` reaches corner `k` of its face.
    fn vertex_event(&mut self, idx: usize, k: usize) {
        let w = self.arena[idx];
        let s = self.s;
        let h = 3 * w.face + k;
        let x = s.vertex(h);
        if x == self.source_vertex {
            return;
        }
        let p = s.tail(h);
        let len = w.src.dist(p);
        self.bound_to[x] = self.bound_to[x].min(len);
        if let Some(c) = s.cone_index(x) {
            if len <= self.best[c] * (1.0 + self.tie) + self.slack {
                if self.best[c].is_infinite() {
                    self.found += 1;
                }
                self.best[c] = self.best[c].min(len);
                self.hits.push(Hit { cone: c, window: idx, corner: k, length: len });
            }
            return;
        }
        if len > self.bound_to[x] * (1.0 + self.tie) + self.slack {
            return;
        }
        // Flat vertex: continue straight, half the full angle further round.
        let back = w.src - p;
        let theta = s.angle(x);
        let a_in = s.angle_of_direction(x, Direction::Ray { corner: h, dir: back }).expect("corner belongs to x");
        let a_out = wrap(a_in + 0.5 * theta, theta);
        let tie = self.tie;
        if self.spawned[x]
            .iter()
            .any(|&(a, l)| same_angle(a, a_out, theta, 1e-9) && (l - len).abs() <= tie * len + 1e-15)
        {
            return;
        }
        self.spawned[x].push((a_out, len));
        let (corner, within) = s.locate_angle(x, a_out);
        let dg = s.direction_in_corner(corner, within);
        let pg = s.tail(corner);
        let df = -back.normalized();
        let t = Rigid::from_segments(p, p + df, pg, pg + dg);
        self.push(Window {
            face: corner / 3,
            entry: Entry::Corner(corner % 3),
            src: t.apply(w.src),
            lo: dg,
            hi: dg,
            lo_open: false,
            hi_open: false,
            ray: true,
            dist: len,
            parent: idx,
            to_parent: t.inverse(),
        });
    }

    fn finish(self) -> Result<Vec<GeodesicPath>, GeodesicError> {
        let n = self.s.cones.len();
        for t in 0..n {
            if t != self.source && self.best[t].is_infinite() {
                return Err(GeodesicError::Unreachable { origin: self.source, target: t });
            }
        }
        let mut paths: Vec<GeodesicPath> = self
            .hits
            .iter()
            .filter(|h| h.length <= self.best[h.cone] * (1.0 + self.tie))
            .map(|h| self.reconstruct(h))
            .collect();
        paths.sort_by(|a, b| {
            a.target.cmp(&b.target).then(a.length.total_cmp(&b.length)).then(a.departure.total_cmp(&b.departure))
        });
        dedupe(&mut paths, self.s);
        Ok(paths)
    }

    fn reconstruct(&self, hit: &Hit) -> GeodesicPath {
        let s = self.s;
        let mut chain = vec![hit.window];
        while let Some(&last) = chain.last() {
            let parent = self.arena[last].parent;
            if parent == ROOT {
                break;
            }
            chain.push(parent);
        }
        chain.reverse();
        let m = chain.len();
        let last = &self.arena[chain[m - 1]];
        let mut target = vec![Point::zero(); m];
        target[m - 1] = s.faces[last.face].pos[hit.corner];
        for k in (0..m - 1).rev() {
            target[k] = self.arena[chain[k + 1]].to_parent.apply(target[k + 1]);
        }
        let entries: Vec<Point> = (0..m)
            .map(|k| {
                let w = &self.arena[chain[k]];
                let pos = s.faces[w.face].pos;
                match w.entry {
                    Entry::Corner(j) => pos[j],
                    Entry::Edge(e) => {
                        let (a, b) = (pos[e], pos[(e + 1) % 3]);
                        match line_intersection(w.src, target[k] - w.src, a, b) {
                            Some((_, t)) => a.lerp(b, t.clamp(0.0, 1.0)),
                            None => a,
                        }
                    }
                }
            })
            .collect();
        let trace = (0..m)
            .map(|k| {
                let w = &self.arena[chain[k]];
                let to = if k + 1 < m { self.arena[chain[k + 1]].to_parent.apply(entries[k + 1]) } else { target[k] };
                TraceStep { face: w.face, from: entries[k], to }
            })
            .collect();

        let root = &self.arena[chain[0]];
        let Entry::Corner(j0) = root.entry else { unreachable!("chains start at a source corner") };
        let departure = s
            .angle_of_direction(
                self.source_vertex,
                Direction::Ray { corner: 3 * root.face + j0, dir: target[0] - root.src },
            )
            .expect("root corner belongs to the source");
        let tv = s.cone_vertex(hit.cone);
        let arrival = s
            .angle_of_direction(
                tv,
                Direction::Ray { corner: 3 * last.face + hit.corner, dir: last.src - target[m - 1] },
            )
            .expect("hit corner belongs to the target");
        GeodesicPath { source: self.source, target: hit.cone, length: hit.length, trace, departure, arrival }
    }
}

/// Root of a decreasing function on `[lo, hi]` with `f(lo) > 0 >= f(hi)`.
fn root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
