//! Planar geometry kernel, generic over the scalar type.
//!
//! Everything above this module works in face-local charts, so the kernel only
//! needs 2D vectors, rigid motions and a handful of predicates.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};

/// Floating point scalar usable by the kernel (`f32` or `f64`).
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Scalar for T where T: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {}

/// A point or displacement in a planar chart.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    #[inline]
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is counterclockwise of `self`.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Unit vector in the same direction; the zero vector maps to itself.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            self
        }
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    /// Polar angle in `(-π, π]`.
    #[inline]
    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn rotated(self, cos: T, sin: T) -> Self {
        Self::new(cos * self.x - sin * self.y, sin * self.x + cos * self.y)
    }

    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> AddAssign for Vec2<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> SubAssign for Vec2<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Div<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Orientation-preserving rigid motion `p ↦ R p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rigid2<T> {
    pub cos: T,
    pub sin: T,
    pub t: Vec2<T>,
}

impl<T: Scalar> Rigid2<T> {
    pub fn identity() -> Self {
        Self { cos: T::one(), sin: T::zero(), t: Vec2::zero() }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(center: Vec2<T>, angle: T) -> Self {
        let (sin, cos) = angle.sin_cos();
        let t = center - center.rotated(cos, sin);
        Self { cos, sin, t }
    }

    /// The motion taking `a` to `a2` and the direction of `b - a` to that of `b2 - a2`.
    pub fn from_segments(a: Vec2<T>, b: Vec2<T>, a2: Vec2<T>, b2: Vec2<T>) -> Self {
        let d1 = (b - a).normalized();
        let d2 = (b2 - a2).normalized();
        let cos = d1.dot(d2);
        let sin = d1.cross(d2);
        let t = a2 - a.rotated(cos, sin);
        Self { cos, sin, t }
    }

    #[inline]
    pub fn apply(&self, p: Vec2<T>) -> Vec2<T> {
        p.rotated(self.cos, self.sin) + self.t
    }

    #[inline]
    pub fn apply_vec(&self, v: Vec2<T>) -> Vec2<T> {
        v.rotated(self.cos, self.sin)
    }

    pub fn inverse(&self) -> Self {
        let (cos, sin) = (self.cos, -self.sin);
        let t = -self.t.rotated(cos, sin);
        Self { cos, sin, t }
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        let cos = other.cos * self.cos - other.sin * self.sin;
        let sin = other.sin * self.cos + other.cos * self.sin;
        Self { cos, sin, t: other.apply(self.t) }
    }

    pub fn rotation_angle(&self) -> T {
        self.sin.atan2(self.cos)
    }
}

/// Twice the signed area of triangle `abc`; positive when counterclockwise.
#[inline]
pub fn orient<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    (b - a).cross(c - a)
}

/// Signed area of a closed polygon (shoelace).
pub fn signed_area<T: Scalar>(pts: &[Vec2<T>]) -> T {
    let n = pts.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc = acc + pts[i].cross(pts[(i + 1) % n]);
    }
    acc / T::two()
}

pub fn perimeter<T: Scalar>(pts: &[Vec2<T>]) -> T {
    let n = pts.len();
    (0..n).fold(T::zero(), |acc, i| acc + pts[i].dist(pts[(i + 1) % n]))
}

/// Counterclockwise angle from `u` to `v`, in `[0, 2π)`.
pub fn ccw_angle<T: Scalar>(u: Vec2<T>, v: Vec2<T>) -> T {
    let a = u.cross(v).atan2(u.dot(v));
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// Interior angle at `cur` of a counterclockwise polygon with neighbours `prev` and `next`.
pub fn interior_angle<T: Scalar>(prev: Vec2<T>, cur: Vec2<T>, next: Vec2<T>) -> T {
    ccw_angle(next - cur, prev - cur)
}

/// Reduces `a` into `[0, period)`.
pub fn wrap<T: Scalar>(a: T, period: T) -> T {
    let r = a % period;
    let r = if r < T::zero() { r + period } else { r };
    if r >= period {
        T::zero()
    } else {
        r
    }
}

/// Distance from `p` to the closed segment `ab`.
pub fn point_segment_dist<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 <= T::zero() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.dist(a + ab * t)
}

/// Whether the closed segments `ab` and `cd` share a point, with absolute slack `eps`.
pub fn segments_touch<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>, eps: T) -> bool {
    segment_distance(a, b, c, d) <= eps
}

/// Minimum distance between closed segments `ab` and `cd`.
pub fn segment_distance<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> T {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let z = T::zero();
    let strictly_cross = ((o1 > z && o2 < z) || (o1 < z && o2 > z)) && ((o3 > z && o4 < z) || (o3 < z && o4 > z));
    if strictly_cross {
        return z;
    }
    point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b))
}

/// Parameter `s` along `p + s·dir` where the line meets the line through `a` and `b`,
/// and parameter `t` along `ab`. `None` when parallel.
pub fn line_intersection<T: Scalar>(p: Vec2<T>, dir: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> Option<(T, T)> {
    let e = b - a;
    let denom = dir.cross(e);
    if denom == T::zero() {
        return None;
    }
    let ap = a - p;
    let s = ap.cross(e) / denom;
    let t = ap.cross(dir) / denom;
    Some((s, t))
}

/// Whether a closed polygon is simple: no two non-adjacent edges touch and adjacent
/// edges meet only at their shared vertex. `eps` is an absolute distance slack.
pub fn is_simple_polygon<T: Scalar>(pts: &[Vec2<T>], eps: T) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared vertex is fine; folding back onto the neighbour edge is not.
                let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let u = other_a - shared;
                let v = other_b - shared;
                if u.cross(v).abs() <= eps * (u.norm() + v.norm()) && u.dot(v) > T::zero() {
                    return false;
                }
            } else if segments_touch(a, b, c, d, eps) {
                return false;
            }
        }
    }
    true
}

/// Whether `p` lies in the closed triangle `abc` (counterclockwise), with slack `eps`
/// measured as a distance.
pub fn in_triangle<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, eps: T) -> bool {
    let edge_ok = |u: Vec2<T>, v: Vec2<T>| {
        let len = u.dist(v);
        len <= T::zero() || orient(u, v, p) / len >= -eps
    };
    edge_ok(a, b) && edge_ok(b, c) && edge_ok(c, a)
}
