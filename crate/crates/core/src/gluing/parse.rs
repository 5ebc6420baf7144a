use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{BoundaryArc, GluingError, GluingSpec, Identification, PolygonSpec};
use crate::geom::{is_simple_polygon, signed_area};
use crate::{Point, Tolerances};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Document {
    polygons: Vec<PolygonDoc>,
    gluings: Vec<GluingDoc>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PolygonDoc {
    id: String,
    vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GluingDoc {
    a: (String, f64, f64),
    b: (String, f64, f64),
}

/// Parses an instance document.
///
/// ```json
/// { "polygons": [ { "id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]] } ],
///   "gluings":  [ { "a": ["sq", 0, 1], "b": ["sq", 3, 4] } ] }
/// ```
///
/// Arc parameters are arc length from vertex 0 along the counterclockwise boundary.
/// An arc with `end < start` wraps past vertex 0; `start == end` names a single zip point.
pub fn parse_spec(text: &str, tol: &Tolerances) -> Result<GluingSpec, GluingError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| GluingError::Malformed(e.to_string()))?;
    if doc.polygons.is_empty() {
        return Err(GluingError::Empty);
    }

    let mut index = HashMap::new();
    let mut polygons = Vec::with_capacity(doc.polygons.len());
    for pd in doc.polygons {
        if index.insert(pd.id.clone(), polygons.len()).is_some() {
            return Err(GluingError::DuplicateId(pd.id));
        }
        polygons.push(validate_polygon(pd)?);
    }

    let mut identifications = Vec::with_capacity(doc.gluings.len());
    for (gi, gd) in doc.gluings.into_iter().enumerate() {
        let a = arc(gi, &gd.a, &index, &polygons, tol)?;
        let b = arc(gi, &gd.b, &index, &polygons, tol)?;
        if a.is_zip() || b.is_zip() {
            let same = a.is_zip()
                && b.is_zip()
                && polygons[a.polygon].point_at(a.start).dist(polygons[b.polygon].point_at(b.start))
                    <= tol.length * polygons[a.polygon].perimeter();
            if !same {
                return Err(GluingError::BadZip { gluing: gi });
            }
        }
        identifications.push(Identification { a, b });
    }

    Ok(GluingSpec { polygons, identifications })
}

fn validate_polygon(pd: PolygonDoc) -> Result<PolygonSpec, GluingError> {
    let vertices: Vec<Point> = pd.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect();
    if vertices.len() < 3 {
        return Err(GluingError::TooFewVertices(pd.id));
    }
    if vertices.iter().any(|v| !v.is_finite()) {
        return Err(GluingError::NonFinite { id: pd.id });
    }
    let n = vertices.len();
    let scale = vertices.iter().fold(0.0f64, |m, v| m.max(v.x.abs()).max(v.y.abs())).max(1.0);
    for i in 0..n {
        if vertices[i].dist(vertices[(i + 1) % n]) <= 1e-12 * scale {
            return Err(GluingError::RepeatedVertex { id: pd.id, index: (i + 1) % n });
        }
    }
    if !is_simple_polygon(&vertices, 1e-12 * scale) {
        return Err(GluingError::NotSimple(pd.id));
    }
    if signed_area(&vertices) <= 0.0 {
        return Err(GluingError::Clockwise(pd.id));
    }
    Ok(PolygonSpec { id: pd.id, vertices })
}

fn arc(
    gluing: usize,
    raw: &(String, f64, f64),
    index: &HashMap<String, usize>,
    polygons: &[PolygonSpec],
    tol: &Tolerances,
) -> Result<BoundaryArc, GluingError> {
    let (id, start, end) = (&raw.0, raw.1, raw.2);
    let &polygon = index.get(id).ok_or_else(|| GluingError::UnknownPolygon { gluing, id: id.clone() })?;
    let per = polygons[polygon].perimeter();
    let slack = tol.length * per;
    let out_of_range = |detail: String| GluingError::ArcOutOfRange { gluing, detail };
    if !start.is_finite() || !end.is_finite() {
        return Err(out_of_range("non-finite parameter".into()));
    }
    if start < -slack || start >= per - slack {
        return Err(out_of_range(format!("start {start} outside [0, {per}) on `{id}`")));
    }
    if end < -slack || end > per + slack {
        return Err(out_of_range(format!("end {end} outside [0, {per}] on `{id}`")));
    }
    let start = start.max(0.0);
    let length = if (end - start).abs() <= slack {
        0.0
    } else if end > start {
        end - start
    } else {
        end + per - start
    };
    Ok(BoundaryArc { polygon, start, length })
}

/// Serializes a spec back into the instance document format.
pub fn to_document(spec: &GluingSpec) -> String {
    let doc = Document {
        polygons: spec
            .polygons
            .iter()
            .map(|p| PolygonDoc { id: p.id.clone(), vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect() })
            .collect(),
        gluings: spec
            .identifications
            .iter()
            .map(|g| {
                let side = |a: &BoundaryArc| {
                    let poly = &spec.polygons[a.polygon];
                    let mut end = a.start + a.length;
                    if end > poly.perimeter() {
                        end -= poly.perimeter();
                    }
                    (poly.id.clone(), a.start, end)
                };
                GluingDoc { a: side(&g.a), b: side(&g.b) }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("documents always serialize")
}
