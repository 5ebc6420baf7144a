//! Instance builders: the golden gluings and seeded random families used by tests and
//! benchmarks.

use std::f64::consts::PI;

use rand::Rng;

use crate::geom::{perimeter, wrap};
use crate::gluing::{BoundaryArc, GluingSpec, Identification, PolygonSpec};
use crate::{Point, Rigid};

fn arc_pair(pa: usize, a: (f64, f64), pb: usize, b: (f64, f64), per_a: f64, per_b: f64) -> Identification {
    let arc = |polygon: usize, (s, e): (f64, f64), per: f64| {
        let start = wrap(s, per);
        let mut length = e - s;
        if length < 0.0 {
            length += per;
        }
        BoundaryArc { polygon, start, length }
    };
    Identification { a: arc(pa, a, per_a), b: arc(pb, b, per_b) }
}

/// Boundary parameter interval `(start, end)`.
type Span = (f64, f64);

fn single(id: &str, vertices: Vec<Point>, arcs: &[(Span, Span)]) -> GluingSpec {
    let per = perimeter(&vertices);
    GluingSpec {
        polygons: vec![PolygonSpec { id: id.into(), vertices }],
        identifications: arcs.iter().map(|&(a, b)| arc_pair(0, a, 0, b, per, per)).collect(),
    }
}

/// Unit square folded across its diagonal from (0,0) to (1,1).
pub fn square_diagonal() -> GluingSpec {
    let v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    single("square", v, &[((0.0, 1.0), (3.0, 4.0)), ((1.0, 2.0), (2.0, 3.0))])
}

/// Unit regular hexagon with the corners at vertices 0, 2 and 4 zipped shut; the
/// other three vertices merge into one flat point.
pub fn hexagon() -> GluingSpec {
    let v = (0..6).map(|k| Point::new((k as f64 * PI / 3.0).cos(), (k as f64 * PI / 3.0).sin())).collect();
    single("hexagon", v, &[((1.0, 2.0), (2.0, 3.0)), ((3.0, 4.0), (4.0, 5.0)), ((5.0, 6.0), (0.0, 1.0))])
}

/// Side-2 equilateral triangle with each edge folded at its midpoint: a regular tetrahedron.
pub fn tetrahedron() -> GluingSpec {
    let v = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 3f64.sqrt())];
    single("triangle", v, &[((0.0, 1.0), (1.0, 2.0)), ((2.0, 3.0), (3.0, 4.0)), ((4.0, 5.0), (5.0, 6.0))])
}

/// Latin cross of six unit squares, counterclockwise from the left end of the crossbar.
pub fn latin_cross_polygon() -> Vec<Point> {
    [
        (0., 2.),
        (1., 2.),
        (1., 0.),
        (2., 0.),
        (2., 2.),
        (3., 2.),
        (3., 3.),
        (2., 3.),
        (2., 4.),
        (1., 4.),
        (1., 3.),
        (0., 3.),
    ]
    .iter()
    .map(|&(x, y)| Point::new(x, y))
    .collect()
}

/// Segment pairs `(i, j)` of the Latin cross gluing: unit boundary segment `[i, i+1]`
/// forward is glued to `[j, j+1]` backward.
///
/// Found by enumerating all 429 non-crossing matchings of the 14 unit segments, for every
/// choice of start vertex, and keeping the flat results with four cone points where the
/// search from `a = v0` first tries the diagonal to the angle-π cone `c = v1` and abandons
/// it. One folding qualifies. Its cone points are `a = v0` (3π/2), `c = v1` (π),
/// `b = v2` (π) and `d = v3` (π/2).
pub const LATIN_CROSS_MATCHING: &[(usize, usize)] = &[(0, 1), (2, 7), (3, 6), (4, 5), (8, 13), (9, 12), (10, 11)];

/// The Latin cross folded to a doubly covered quadrilateral.
pub fn latin_cross() -> GluingSpec {
    segment_gluing("cross", latin_cross_polygon(), LATIN_CROSS_MATCHING)
}

/// Every non-crossing perfect matching of `2m` boundary segments, as `(i, j)` pairs with `i < j`.
pub fn noncrossing_matchings(segments: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo >= hi {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let mut j = lo + 1;
        while j < hi {
            for inner in rec(lo + 1, j) {
                for outer in rec(j + 1, hi) {
                    let mut m = vec![(lo, j)];
                    m.extend(inner.iter().copied());
                    m.extend(outer.iter().copied());
                    out.push(m);
                }
            }
            j += 2;
        }
        out
    }
    rec(0, segments)
}

/// Gluing of unit segments `[k, k+1]` of one polygon by a matching.
pub fn segment_gluing(id: &str, vertices: Vec<Point>, matching: &[(usize, usize)]) -> GluingSpec {
    let arcs: Vec<(Span, Span)> =
        matching.iter().map(|&(i, j)| ((i as f64, i as f64 + 1.0), (j as f64, j as f64 + 1.0))).collect();
    single(id, vertices, &arcs)
}

/// Convex polygon with `n` vertices on a random ellipse, angles stratified so no two
/// vertices crowd together.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    let (ax, ay) = (rng.gen_range(0.6..1.4), rng.gen_range(0.6..1.4));
    let phase = rng.gen_range(0.0..2.0 * PI);
    (0..n)
        .map(|k| {
            let t = phase + 2.0 * PI * (k as f64 + rng.gen_range(0.2..0.8)) / n as f64;
            Point::new(ax * t.cos(), ay * t.sin())
        })
        .collect()
}

/// Folds the whole perimeter in half: the arc from `start` to the antipodal parameter
/// is glued to the remaining arc.
pub fn perimeter_halving(vertices: Vec<Point>, start: f64) -> GluingSpec {
    let per = perimeter(&vertices);
    let half = start + 0.5 * per;
    single("p", vertices, &[((start, half), (half, start + per))])
}

/// Options for [`double_cover`].
#[derive(Clone, Copy, Debug)]
pub struct CoverOptions {
    /// Arc boundaries placed at random parameters instead of at the vertices.
    pub random_cuts: usize,
    /// Collinear vertices inserted on random edges of each copy.
    pub collinear_points: usize,
}

/// Two copies of a convex polygon glued along their boundaries.
///
/// The second copy is the mirror image, moved by a random rigid motion. Arcs run between
/// random cut parameters when `random_cuts > 0`, otherwise between the polygon vertices.
pub fn double_cover<R: Rng>(rng: &mut R, q: &[Point], opts: CoverOptions) -> GluingSpec {
    let n = q.len();
    let per = perimeter(q);
    let mirror: Vec<Point> = std::iter::once(0).chain((1..n).rev()).map(|k| Point::new(q[k].x, -q[k].y)).collect();
    let motion = Rigid::rotation_about(Point::zero(), rng.gen_range(0.0..2.0 * PI));
    let shift = Point::new(rng.gen_range(2.5..4.0), rng.gen_range(-1.0..1.0));
    let mirror: Vec<Point> = mirror.iter().map(|&p| motion.apply(p) + shift).collect();

    let top = insert_collinear(rng, q, opts.collinear_points);
    let bottom = insert_collinear(rng, &mirror, opts.collinear_points);

    let mut cuts: Vec<f64> = if opts.random_cuts == 0 {
        let mut acc = 0.0;
        (0..n)
            .map(|i| {
                let here = acc;
                acc += q[i].dist(q[(i + 1) % n]);
                here
            })
            .collect()
    } else {
        (0..opts.random_cuts.max(2)).map(|_| rng.gen_range(0.0..per)).collect()
    };
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * per);
    let m = cuts.len();
    let identifications = (0..m)
        .map(|i| {
            let (s, e) = (cuts[i], if i + 1 < m { cuts[i + 1] } else { cuts[0] + per });
            arc_pair(0, (s, e), 1, (per - e, per - s), per, per)
        })
        .collect();
    GluingSpec {
        polygons: vec![
            PolygonSpec { id: "top".into(), vertices: top },
            PolygonSpec { id: "bottom".into(), vertices: bottom },
        ],
        identifications,
    }
}

/// Inserts `count` points on random edges, strictly between their endpoints.
fn insert_collinear<R: Rng>(rng: &mut R, poly: &[Point], count: usize) -> Vec<Point> {
    let mut out = poly.to_vec();
    for _ in 0..count {
        // Only split original edges so vertex 0 and the arc parameters stay put.
        let i = rng.gen_range(0..out.len());
        let (a, b) = (out[i], out[(i + 1) % out.len()]);
        let p = a.lerp(b, rng.gen_range(0.25..0.75));
        out.insert(i + 1, p);
    }
    out
}
