//! Result and report documents, and the SVG rendering.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::pipeline::SolveOutcome;
use crate::{GluingSpec, Point, RefinedGluing, Tolerances, ValidationReport};

fn xy(p: Point) -> Value {
    json!([p.x, p.y])
}

fn cone_table(r: &RefinedGluing, s: &crate::Surface) -> Value {
    s.cones
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (p, param) = r.class_key(c.class);
            json!({ "index": i, "angle": c.angle, "polygon": r.polygons[p].id, "param": param })
        })
        .collect()
}

/// The solve result: `flat` with the polygon, or `not_flat` with search statistics.
pub fn result_document(out: &SolveOutcome) -> Value {
    let s = &out.surface;
    let mut doc = serde_json::Map::new();
    match (&out.flat, &out.search.rim) {
        (Some(flat), Some(rim)) => {
            doc.insert("verdict".into(), json!("flat"));
            doc.insert("tolerances".into(), json!(out.tolerances));
            doc.insert("cones".into(), cone_table(&out.refined, s));
            doc.insert("rim".into(), json!({ "order": rim.order, "segment_lengths": rim.lengths(&out.sigma) }));
            doc.insert("polygon".into(), flat.polygon.iter().map(|&p| xy(p)).collect());
            doc.insert(
                "correspondence".into(),
                flat.cones.iter().enumerate().map(|(k, &c)| json!({ "vertex": k, "cone": c })).collect(),
            );
            doc.insert("interior_angles".into(), json!(flat.interior_angles));
            doc.insert("half_areas".into(), json!(flat.half_areas));
        }
        _ => {
            doc.insert("verdict".into(), json!("not_flat"));
            doc.insert("tolerances".into(), json!(out.tolerances));
            doc.insert("cones".into(), cone_table(&out.refined, s));
            doc.insert(
                "statistics".into(),
                json!({
                    "cone_points": s.cones.len(),
                    "shortest_paths": out.sigma.len(),
                    "starts_explored": out.search.starts_explored,
                }),
            );
        }
    }
    Value::Object(doc)
}

/// The validation report with the cone-point census.
pub fn check_document(r: &RefinedGluing, report: &ValidationReport, tol: &Tolerances) -> Value {
    let cones = crate::gluing::cone_points(r);
    let census = match &cones {
        Ok(c) => json!({
            "n": c.len(),
            "angles": c.iter().map(|c| c.angle).collect::<Vec<_>>(),
        }),
        Err(e) => {
            json!({ "n": r.classes.iter().filter(|c| c.angle < std::f64::consts::TAU - tol.angle).count(), "error": e.to_string() })
        }
    };
    json!({
        "pass": report.all_pass(),
        "tolerances": tol,
        "conditions": report,
        "cone_points": census,
        "gauss_bonnet_residual": r.gauss_bonnet_residual(),
    })
}

const CANVAS: f64 = 1000.0;
const MARGIN: f64 = 40.0;

/// Maps a point set into a panel of the canvas, preserving aspect ratio.
struct Fit {
    scale: f64,
    offset: Point,
    min: Point,
}

impl Fit {
    fn new(points: &[Point], x0: f64, y0: f64, w: f64, h: f64) -> Self {
        let (mut lo, mut hi) =
            (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = Point::new((hi.x - lo.x).max(1e-12), (hi.y - lo.y).max(1e-12));
        let scale = ((w - 2.0 * MARGIN) / span.x).min((h - 2.0 * MARGIN) / span.y);
        let used = Point::new(span.x * scale, span.y * scale);
        let offset = Point::new(x0 + 0.5 * (w - used.x), y0 + 0.5 * (h - used.y));
        Fit { scale, offset, min: lo }
    }

    /// SVG y grows downward.
    fn map(&self, p: Point, height: f64) -> (f64, f64) {
        let x = self.offset.x + (p.x - self.min.x) * self.scale;
        let y = self.offset.y + height - (p.y - self.min.y) * self.scale;
        (x, y)
    }
}

fn path_d(points: impl Iterator<Item = (f64, f64)>, close: bool) -> String {
    let mut d = String::new();
    for (k, (x, y)) in points.enumerate() {
        let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" });
    }
    if close {
        d.push('Z');
    }
    d.trim_end().to_string()
}

/// Input polygons with the rim traced over them (top), and the output polygon (bottom).
pub fn svg(spec: &GluingSpec, out: &SolveOutcome) -> String {
    let mut body = String::new();
    let top_h = 600.0;
    let mut inputs: Vec<Vec<Point>> = Vec::new();
    let mut cursor = 0.0;
    // Lay the input polygons side by side.
    for poly in &spec.polygons {
        let min_x = poly.vertices.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let max_x = poly.vertices.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let shift = cursor - min_x;
        inputs.push(poly.vertices.iter().map(|p| Point::new(p.x + shift, p.y)).collect());
        cursor += (max_x - min_x) * 1.15;
    }
    let shifts: Vec<Point> = spec.polygons.iter().zip(&inputs).map(|(p, q)| q[0] - p.vertices[0]).collect();
    let all: Vec<Point> = inputs.iter().flatten().copied().collect();
    let fit = Fit::new(&all, 0.0, 0.0, CANVAS, top_h);
    let h_used = {
        let ys = all.iter().map(|p| p.y);
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        (hi - lo) * fit.scale
    };
    for poly in &inputs {
        let d = path_d(poly.iter().map(|&p| fit.map(p, h_used)), true);
        let _ = writeln!(body, r##"  <path d="{d}" fill="#eef2f7" stroke="#334" stroke-width="1.5"/>"##);
    }
    if let Some(rim) = &out.search.rim {
        for &k in &rim.segments {
            for step in &out.sigma.path(k).trace {
                let shift = shifts[out.surface.faces[step.face].polygon];
                let (a, b) = (fit.map(step.from + shift, h_used), fit.map(step.to + shift, h_used));
                let _ = writeln!(
                    body,
                    r##"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#c0392b" stroke-width="2.5"/>"##,
                    a.0, a.1, b.0, b.1
                );
            }
        }
    }
    if let Some(flat) = &out.flat {
        let bottom = Fit::new(&flat.polygon, 0.0, top_h, CANVAS, CANVAS - top_h);
        let ys = flat.polygon.iter().map(|p| p.y);
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        let h = (hi - lo) * bottom.scale;
        let d = path_d(flat.polygon.iter().map(|&p| bottom.map(p, h)), true);
        let _ = writeln!(body, r##"  <path d="{d}" fill="#fdebd0" stroke="#c0392b" stroke-width="2"/>"##);
        for (k, &p) in flat.polygon.iter().enumerate() {
            let (x, y) = bottom.map(p, h);
            let _ = writeln!(
                body,
                r##"  <text x="{x:.3}" y="{y:.3}" font-size="18" fill="#222">v{}</text>"##,
                flat.cones[k]
            );
        }
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}
