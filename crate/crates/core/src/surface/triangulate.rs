//! Ear clipping without Steiner points.

use crate::geom::{in_triangle, orient, Scalar, Vec2};

/// Triangulates a simple counterclockwise polygon by ear clipping.
///
/// Straight (collinear) vertices are kept as triangle corners; no emitted triangle has
/// area below `1e-12 ×` its longest edge squared. Among the valid ears at each step the
/// one with the largest minimum angle is clipped. Returns `None` when no valid ear
/// exists.
pub fn ear_clip<T: Scalar>(pts: &[Vec2<T>]) -> Option<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let scale = pts.iter().fold(T::zero(), |m, p| m.max(p.x.abs()).max(p.y.abs())).max(T::one());
    let eps = T::lit(1e-12) * scale;
    let mut ring: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 2);

    while ring.len() > 3 {
        let m = ring.len();
        let mut best: Option<(T, usize)> = None;
        for i in 0..m {
            let (a, b, c) = (ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]);
            if degenerate(pts[a], pts[b], pts[c]) || orient(pts[a], pts[b], pts[c]) <= T::zero() {
                continue;
            }
            let blocked = ring.iter().any(|&k| {
                k != a
                    && k != b
                    && k != c
                    && pts[k] != pts[a]
                    && pts[k] != pts[b]
                    && pts[k] != pts[c]
                    && in_triangle(pts[k], pts[a], pts[b], pts[c], eps)
            });
            if blocked {
                continue;
            }
            let q = min_angle(pts[a], pts[b], pts[c]);
            if best.is_none_or(|(bq, _)| q > bq) {
                best = Some((q, i));
            }
        }
        let (_, i) = best?;
        let m = ring.len();
        out.push([ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]]);
        ring.remove(i);
    }
    let (a, b, c) = (ring[0], ring[1], ring[2]);
    if degenerate(pts[a], pts[b], pts[c]) || orient(pts[a], pts[b], pts[c]) <= T::zero() {
        return None;
    }
    out.push([a, b, c]);
    Some(out)
}

/// Area below `1e-12 ×` the squared longest edge.
pub fn degenerate<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> bool {
    let longest = (b - a).norm_sq().max((c - b).norm_sq()).max((a - c).norm_sq());
    orient(a, b, c).abs() / T::two() < T::lit(1e-12) * longest
}

fn min_angle<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    let ang = |p: Vec2<T>, q: Vec2<T>, r: Vec2<T>| {
        let u = q - p;
        let v = r - p;
        u.cross(v).abs().atan2(u.dot(v))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}
