//! Exhaustive unfolding oracle for a single pair of cone points.
//!
//! Face sequences are enumerated best-first from the faces around the source, pruned
//! only by visibility (the straight segment must pass every edge of the strip) and a
//! depth cap. Strips may pass straight through flat vertices. Every candidate is
//! re-unfolded from the surface's transition maps and checked explicitly before it is
//! accepted.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

use super::{dedupe, same_angle, GeodesicError, GeodesicPath, TraceStep};
use crate::geom::{line_intersection, point_segment_dist, segment_distance, wrap};
use crate::surface::{Direction, Surface};
use crate::{Point, Rigid};

const DIR_EPS: f64 = 1e-10;
const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
enum Link {
    /// The source corner.
    Root(usize),
    /// Crossed the parent face's half-edge.
    Edge(usize),
    /// Passed straight through a flat vertex from the parent's corner into this corner.
    Hop { from: usize, into: usize },
}

#[derive(Clone, Copy, Debug)]
struct Strip {
    face: usize,
    link: Link,
    src: Point,
    lo: Point,
    hi: Point,
    ray: bool,
    dist: f64,
    depth: usize,
    parent: usize,
}

/// Shortest length between two cone points and every path attaining it.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub length: f64,
    pub paths: Vec<GeodesicPath>,
}

pub fn oracle_shortest_path(s: &Surface, i: usize, j: usize, cap: usize) -> Result<OracleResult, GeodesicError> {
    let n = s.cones.len();
    if i >= n {
        return Err(GeodesicError::NotACone(i));
    }
    if j >= n || j == i {
        return Err(GeodesicError::NotACone(j));
    }
    let sv = s.cone_vertex(i);
    let tv = s.cone_vertex(j);
    let tie = s.tolerances.tie;
    let mut arena: Vec<Strip> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut found: Vec<GeodesicPath> = Vec::new();
    let mut best = f64::INFINITY;
    let mut hops: Vec<Vec<(f64, f64)>> = vec![Vec::new(); s.vertex_count()];

    let push = |arena: &mut Vec<Strip>, heap: &mut BinaryHeap<_>, st: Strip| {
        heap.push((Reverse(OrderedFloat(st.dist)), arena.len()));
        arena.push(st);
    };
    for &h in s.fan(sv) {
        let (f, c) = (h / 3, h % 3);
        let pos = s.faces[f].pos;
        let st = Strip {
            face: f,
            link: Link::Root(c),
            src: pos[c],
            lo: (pos[(c + 1) % 3] - pos[c]).normalized(),
            hi: (pos[(c + 2) % 3] - pos[c]).normalized(),
            ray: false,
            dist: 0.0,
            depth: 0,
            parent: NONE,
        };
        push(&mut arena, &mut heap, st);
    }

    while let Some((Reverse(OrderedFloat(dist)), idx)) = heap.pop() {
        if dist > best * (1.0 + tie) {
            break;
        }
        let st = arena[idx];
        let pos = s.faces[st.face].pos;
        let mut reached: Vec<usize> = Vec::new();
        let mut exits: Vec<usize> = Vec::new();
        match st.link {
            Link::Root(c) => {
                reached.extend([(c + 1) % 3, (c + 2) % 3]);
                exits.push((c + 1) % 3);
            }
            Link::Hop { into, .. } => {
                let c = into % 3;
                let d = st.lo;
                let mut along = false;
                for k in [(c + 1) % 3, (c + 2) % 3] {
                    let e = (pos[k] - pos[c]).normalized();
                    if e.cross(d).abs() <= DIR_EPS && e.dot(d) > 0.0 {
                        reached.push(k);
                        along = true;
                    }
                }
                if !along {
                    exits.push((c + 1) % 3);
                }
            }
            Link::Edge(h) => {
                let e = s.twin(h) % 3;
                let c = (e + 2) % 3;
                let uc = (pos[c] - st.src).normalized();
                let (s_lo, s_hi) = (st.lo.cross(uc), uc.cross(st.hi));
                if s_lo >= -DIR_EPS && s_hi >= -DIR_EPS {
                    reached.push(c);
                }
                exits.extend([(e + 1) % 3, c]);
            }
        }

        for k in reached {
            let h = 3 * st.face + k;
            let x = s.vertex(h);
            let p = pos[k];
            let len = st.src.dist(p);
            if x == tv {
                if let Some(path) = validate(s, &arena, idx, k, i, j) {
                    best = best.min(path.length);
                    found.push(path);
                }
            } else if !s.is_cone(x) && st.depth < cap {
                let theta = s.angle(x);
                let back = st.src - p;
                let a_in = s.angle_of_direction(x, Direction::Ray { corner: h, dir: back }).expect("corner at x");
                let a_out = wrap(a_in + 0.5 * theta, theta);
                if hops[x]
                    .iter()
                    .any(|&(a, l)| same_angle(a, a_out, theta, 1e-9) && (l - len).abs() <= 1e-12 * len.max(1.0))
                {
                    continue;
                }
                hops[x].push((a_out, len));
                let (into, within) = s.locate_angle(x, a_out);
                let dg = s.direction_in_corner(into, within);
                let pg = s.tail(into);
                let t = Rigid::from_segments(p, p - back.normalized(), pg, pg + dg);
                let child = Strip {
                    face: into / 3,
                    link: Link::Hop { from: h, into },
                    src: t.apply(st.src),
                    lo: dg,
                    hi: dg,
                    ray: true,
                    dist: len,
                    depth: st.depth + 1,
                    parent: idx,
                };
                push(&mut arena, &mut heap, child);
            }
        }

        if st.depth >= cap {
            continue;
        }
        for le in exits {
            let h = 3 * st.face + le;
            let (a, b) = (s.tail(h), s.head(h));
            let Some((lo, hi)) = clip(st, a, b) else { continue };
            let t = s.transition(h);
            let dist = point_segment_dist(st.src, a + (b - a) * lo.0, a + (b - a) * hi.0).max(st.dist);
            let tw = s.twin(h);
            let child = Strip {
                face: tw / 3,
                link: Link::Edge(h),
                src: t.apply(st.src),
                lo: t.apply_vec(lo.1),
                hi: t.apply_vec(hi.1),
                ray: st.ray,
                dist,
                depth: st.depth + 1,
                parent: idx,
            };
            push(&mut arena, &mut heap, child);
        }
    }

    if found.is_empty() {
        return Err(GeodesicError::CapExceeded { cap });
    }
    found.retain(|p| p.length <= best * (1.0 + tie));
    found.sort_by(|a, b| a.length.total_cmp(&b.length).then(a.departure.total_cmp(&b.departure)));
    dedupe(&mut found, s);
    Ok(OracleResult { length: best, paths: found })
}

/// Part of the strip's wedge that passes through segment `ab`, as edge parameters with
/// the matching directions. `None` when the wedge misses the segment.
fn clip(st: Strip, a: Point, b: Point) -> Option<((f64, Point), (f64, Point))> {
    let da = (a - st.src).normalized();
    let db = (b - st.src).normalized();
    // From inside the face, the exit edge a→b is seen with a clockwise of b.
    let param = |dir: Point| line_intersection(st.src, dir, a, b).map(|(_, t)| t.clamp(0.0, 1.0));
    let (lo, hi) = if st.ray { (st.lo, st.lo) } else { (st.lo, st.hi) };
    // Clamp the wedge to the directions [da, db].
    let lo_dir = if da.cross(lo) >= 0.0 { lo } else { da };
    let hi_dir = if hi.cross(db) >= 0.0 { hi } else { db };
    if lo_dir.cross(hi_dir) < -DIR_EPS {
        return None;
    }
    if st.ray && (da.cross(lo) < -DIR_EPS || lo.cross(db) < -DIR_EPS) {
        return None;
    }
    let t0 = param(lo_dir)?;
    let t1 = param(hi_dir)?;
    Some(((t0.min(t1), lo_dir), (t0.max(t1), hi_dir)))
}

/// Re-unfolds the strip ending at `idx` into the source chart and checks the straight
/// segment to the target corner `k` against every edge, hop and cone vertex of the strip.
fn validate(s: &Surface, arena: &[Strip], idx: usize, k: usize, i: usize, j: usize) -> Option<GeodesicPath> {
    let mut chain = vec![idx];
    while arena[*chain.last().unwrap()].parent != NONE {
        chain.push(arena[*chain.last().unwrap()].parent);
    }
    chain.reverse();
    // to_root[m]: chart of strip m → chart of the root face.
    let mut to_root = vec![Rigid::identity(); chain.len()];
    for m in 1..chain.len() {
        let step = match arena[chain[m]].link {
            Link::Edge(h) => s.transition(h).inverse(),
            Link::Hop { from, into } => fan_unfold(s, from, into)?.inverse(),
            Link::Root(_) => return None,
        };
        to_root[m] = step.then(&to_root[m - 1]);
    }
    let Link::Root(c0) = arena[chain[0]].link else { return None };
    let root_face = arena[chain[0]].face;
    let src = s.faces[root_face].pos[c0];
    let last = chain.len() - 1;
    let last_face = arena[chain[last]].face;
    let tgt = to_root[last].apply(s.faces[last_face].pos[k]);
    let len = src.dist(tgt);
    if len <= 0.0 {
        return None;
    }
    let tol = 1e-9 * len;

    // Entry point of each strip, in the root chart.
    let mut entries = vec![src];
    for m in 1..chain.len() {
        match arena[chain[m]].link {
            Link::Edge(h) => {
                let (a, b) = (to_root[m - 1].apply(s.tail(h)), to_root[m - 1].apply(s.head(h)));
                if segment_distance(src, tgt, a, b) > tol {
                    return None;
                }
                let (_, t) = line_intersection(src, tgt - src, a, b)?;
                entries.push(a.lerp(b, t.clamp(0.0, 1.0)));
            }
            Link::Hop { from, .. } => {
                let p = to_root[m - 1].apply(s.tail(from));
                if point_segment_dist(p, src, tgt) > tol || p.dist(src) <= tol || p.dist(tgt) <= tol {
                    return None;
                }
                entries.push(p);
            }
            Link::Root(_) => return None,
        }
    }
    // No cone vertex of the strip may sit in the interior of the segment.
    for (m, &w) in chain.iter().enumerate() {
        let f = arena[w].face;
        for c in 0..3 {
            if !s.is_cone(s.vertex(3 * f + c)) {
                continue;
            }
            let q = to_root[m].apply(s.faces[f].pos[c]);
            if q.dist(src) <= tol || q.dist(tgt) <= tol {
                continue;
            }
            if point_segment_dist(q, src, tgt) <= 1e-12 * len {
                return None;
            }
        }
    }
    let trace = (0..chain.len())
        .map(|m| {
            let back = to_root[m].inverse();
            let exit = if m + 1 < chain.len() { entries[m + 1] } else { tgt };
            TraceStep { face: arena[chain[m]].face, from: back.apply(entries[m]), to: back.apply(exit) }
        })
        .collect();
    let sv = s.cone_vertex(i);
    let tv = s.cone_vertex(j);
    let departure = s.angle_of_direction(sv, Direction::Ray { corner: 3 * root_face + c0, dir: tgt - src }).ok()?;
    let back = to_root[last].inverse();
    let arrival = s
        .angle_of_direction(tv, Direction::Ray { corner: 3 * last_face + k, dir: back.apply(src) - back.apply(tgt) })
        .ok()?;
    Some(GeodesicPath { source: i, target: j, length: len, trace, departure, arrival })
}

/// Rigid map from the chart of corner `from` to the chart of corner `into`, both at the
/// same flat vertex, obtained by chaining twin transitions counterclockwise around it.
fn fan_unfold(s: &Surface, from: usize, into: usize) -> Option<Rigid> {
    let mut map = Rigid::identity();
    let mut cur = from;
    for _ in 0..=s.halfedge_count() {
        if cur == into {
            return Some(map);
        }
        let cross = Surface::prev(cur);
        map = map.then(&s.transition(cross));
        cur = s.twin(cross);
    }
    None
}
