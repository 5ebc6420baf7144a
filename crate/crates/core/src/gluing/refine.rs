use petgraph::unionfind::UnionFind;

use super::{BoundaryArc, GluingError, GluingSpec, QuotientClass, RefinedGluing, RefinedPolygon, TilingDefect};
use crate::geom::{interior_angle, wrap};
use crate::Tolerances;

/// Sorted boundary parameters of one polygon, with snapping at the length tolerance.
struct ParamSet {
    params: Vec<f64>,
    perimeter: f64,
    eps: f64,
}

impl ParamSet {
    fn find(&self, s: f64) -> Option<usize> {
        let s = wrap(s, self.perimeter);
        let i = self.params.partition_point(|&p| p < s);
        let near = |j: usize| {
            let d = (self.params[j] - s).abs();
            d.min(self.perimeter - d) <= self.eps
        };
        let n = self.params.len();
        [i % n, (i + n - 1) % n, 0, n - 1].into_iter().find(|&j| near(j))
    }

    /// Inserts `s` unless a parameter within tolerance is present; reports insertion.
    fn insert(&mut self, s: f64) -> bool {
        if self.find(s).is_some() {
            return false;
        }
        let s = wrap(s, self.perimeter);
        let i = self.params.partition_point(|&p| p < s);
        self.params.insert(i, s);
        true
    }

    /// Offset of `s` past `start`, in `[0, perimeter)`, snapping to zero.
    fn offset(&self, start: f64, s: f64) -> f64 {
        let t = wrap(s - start, self.perimeter);
        if self.perimeter - t <= self.eps {
            0.0
        } else {
            t
        }
    }
}

/// Refines a gluing so that every identification maps whole edges to whole edges.
///
/// Arc endpoints become boundary vertices, then every boundary vertex lying inside an
/// arc has its image inserted on the partner arc until nothing new appears. Tiling
/// defects (gaps and overlaps) are recorded on the result rather than rejected, so
/// that the validation report can describe them.
pub fn refine(spec: &GluingSpec, tol: &Tolerances) -> Result<RefinedGluing, GluingError> {
    let mut sets: Vec<ParamSet> = spec
        .polygons
        .iter()
        .map(|p| {
            let perimeter = p.perimeter();
            ParamSet { params: p.vertex_params(), perimeter, eps: tol.length * perimeter }
        })
        .collect();

    for (gi, g) in spec.identifications.iter().enumerate() {
        let (la, lb) = (g.a.length, g.b.length);
        if (la - lb).abs() > tol.length * la.max(lb).max(1.0) {
            return Err(GluingError::ArcLengthMismatch { gluing: gi, a: la, b: lb });
        }
        for arc in [g.a, g.b] {
            let set = &mut sets[arc.polygon];
            set.insert(arc.start);
            set.insert(arc.start + arc.length);
        }
    }

    let n_input = spec.vertex_count();
    let cap = n_input * n_input;
    let mut insertions = 0usize;
    loop {
        let mut changed = false;
        for g in &spec.identifications {
            if g.a.is_zip() {
                continue;
            }
            for (from, to) in [(g.a, g.b), (g.b, g.a)] {
                let images = images_into(&sets[from.polygon], from, to);
                for s in images {
                    if sets[to.polygon].insert(s) {
                        insertions += 1;
                        changed = true;
                        if insertions > cap {
                            return Err(GluingError::RefinementDiverged { cap });
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Refined polygons.
    let mut polygons = Vec::with_capacity(spec.polygons.len());
    let mut offset = 0;
    for (p, set) in spec.polygons.iter().zip(&sets) {
        let vparams = p.vertex_params();
        let original = set.params.iter().map(|&s| vparams.iter().position(|&v| (v - s).abs() <= set.eps)).collect();
        let vertices = set
            .params
            .iter()
            .zip(&original)
            .map(|(&s, o): (&f64, &Option<usize>)| match o {
                Some(i) => p.vertices[*i],
                None => p.point_at(s),
            })
            .collect();
        polygons.push(RefinedPolygon {
            id: p.id.clone(),
            vertices,
            params: set.params.clone(),
            original,
            perimeter: set.perimeter,
            offset,
        });
        offset += set.params.len();
    }
    let total = offset;

    // Edge pairing and coverage.
    let mut pairing: Vec<Option<usize>> = vec![None; total];
    let mut coverage = vec![0usize; total];
    for (gi, g) in spec.identifications.iter().enumerate() {
        if g.a.is_zip() {
            continue;
        }
        let ea = arc_edges(&polygons[g.a.polygon], &sets[g.a.polygon], g.a);
        let eb = arc_edges(&polygons[g.b.polygon], &sets[g.b.polygon], g.b);
        if ea.len() != eb.len() {
            return Err(GluingError::RefinementMismatch { gluing: gi });
        }
        for e in ea.iter().chain(&eb) {
            coverage[*e] += 1;
        }
        for (i, &e) in ea.iter().enumerate() {
            let f = eb[eb.len() - 1 - i];
            let len_e = edge_len(&polygons, g.a.polygon, e);
            let len_f = edge_len(&polygons, g.b.polygon, f);
            if (len_e - len_f).abs() > tol.length * len_e.max(len_f).max(1.0) * 10.0 {
                return Err(GluingError::RefinementMismatch { gluing: gi });
            }
            if pairing[e].is_none() && pairing[f].is_none() && e != f {
                pairing[e] = Some(f);
                pairing[f] = Some(e);
            }
        }
    }

    let mut defects = Vec::new();
    for rp in &polygons {
        let n = rp.len();
        for k in 0..n {
            let e = rp.offset + k;
            let (from, to) = (rp.params[k], if k + 1 < n { rp.params[k + 1] } else { rp.perimeter });
            match coverage[e] {
                0 => defects.push(TilingDefect::Gap { polygon: rp.id.clone(), from, to }),
                1 => {}
                times => defects.push(TilingDefect::Overlap { polygon: rp.id.clone(), from, to, times }),
            }
        }
    }

    // Quotient classes: edge u→v glued to u'→v' identifies u with v' and v with u'.
    let mut uf = UnionFind::<usize>::new(total);
    let next_of = |g: usize| {
        let p = polygons.partition_point(|rp| rp.offset <= g) - 1;
        let rp = &polygons[p];
        rp.offset + (g - rp.offset + 1) % rp.len()
    };
    for (e, &partner) in pairing.iter().enumerate() {
        if let Some(f) = partner {
            uf.union(e, next_of(f));
            uf.union(next_of(e), f);
        }
    }
    let labels = uf.into_labeling();
    let mut class_index = vec![usize::MAX; total];
    let mut classes: Vec<QuotientClass> = Vec::new();
    let mut class_of = vec![0; total];
    let mut corner_angles = vec![0.0; total];
    for rp in &polygons {
        let n = rp.len();
        for k in 0..n {
            let g = rp.offset + k;
            corner_angles[g] = interior_angle(rp.vertices[(k + n - 1) % n], rp.vertices[k], rp.vertices[(k + 1) % n]);
        }
    }
    for g in 0..total {
        let root = labels[g];
        if class_index[root] == usize::MAX {
            class_index[root] = classes.len();
            classes.push(QuotientClass { members: Vec::new(), angle: 0.0 });
        }
        let c = class_index[root];
        class_of[g] = c;
        classes[c].members.push(g);
        classes[c].angle += corner_angles[g];
    }

    Ok(RefinedGluing {
        polygons,
        pairing,
        class_of,
        classes,
        corner_angles,
        defects,
        insertions,
        input_vertex_count: n_input,
        tolerances: *tol,
    })
}

/// Images on `to` of every parameter of `from`'s polygon strictly inside `from`.
fn images_into(set: &ParamSet, from: BoundaryArc, to: BoundaryArc) -> Vec<f64> {
    let scale = to.length / from.length;
    set.params
        .iter()
        .filter_map(|&s| {
            let t = set.offset(from.start, s);
            if t <= set.eps || t >= from.length - set.eps {
                return None;
            }
            // Forward offset t on one side meets forward offset len - t on the other.
            Some(to.start + (from.length - t) * scale)
        })
        .collect()
}

/// Global ids of the refined edges covered by `arc`, in forward order.
fn arc_edges(rp: &RefinedPolygon, set: &ParamSet, arc: BoundaryArc) -> Vec<usize> {
    let n = rp.len();
    let Some(mut k) = set.find(arc.start) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    loop {
        let next = (k + 1) % n;
        let reach = set.offset(arc.start, rp.params[next]);
        let reach = if reach == 0.0 { set.perimeter } else { reach };
        if reach > arc.length + set.eps {
            break;
        }
        out.push(rp.offset + k);
        k = next;
        if (reach - arc.length).abs() <= set.eps || out.len() == n {
            break;
        }
    }
    out
}

fn edge_len(polygons: &[RefinedPolygon], p: usize, e: usize) -> f64 {
    let rp = &polygons[p];
    let k = e - rp.offset;
    rp.vertices[k].dist(rp.vertices[(k + 1) % rp.len()])
}
