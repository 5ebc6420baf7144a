use std::f64::consts::PI;

use flatfold::generate;
use flatfold::gluing::{check_alexandrov, cone_points, parse_spec, refine, to_document};
use flatfold::surface::Direction;
use flatfold::{GluingSpec, Surface, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn instance(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../instances/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn angles(spec: &GluingSpec) -> Vec<f64> {
    let r = refine(spec, &tol()).unwrap();
    assert!(check_alexandrov(&r).all_pass());
    let mut a: Vec<f64> = cone_points(&r).unwrap().iter().map(|c| c.angle).collect();
    a.sort_by(f64::total_cmp);
    a
}

#[test]
fn instance_files_parse() {
    let sq = parse_spec(&instance("square_diagonal"), &tol()).unwrap();
    assert_eq!((sq.polygons.len(), sq.identifications.len()), (1, 2));
    let hex = parse_spec(&instance("hexagon"), &tol()).unwrap();
    assert_eq!((hex.polygons.len(), hex.identifications.len()), (1, 3));
    for (name, spec) in [("hexagon", generate::hexagon()), ("latin_cross", generate::latin_cross())] {
        let parsed = parse_spec(&instance(name), &tol()).unwrap();
        assert_eq!(to_document(&parsed), to_document(&spec), "{name}");
    }
}

#[test]
fn square_cone_angles() {
    let a = angles(&generate::square_diagonal());
    let want = [PI / 2.0, PI / 2.0, PI];
    assert!(a.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-12), "{a:?}");
}

#[test]
fn hexagon_cones_and_flat_class() {
    let r = refine(&generate::hexagon(), &tol()).unwrap();
    let cones = cone_points(&r).unwrap();
    assert_eq!(cones.len(), 3);
    for c in &cones {
        assert!((c.angle - 2.0 * PI / 3.0).abs() < 1e-12);
    }
    // Vertices 1, 3 and 5 merge into one flat point.
    let flat: Vec<_> = r.classes.iter().filter(|c| (c.angle - 2.0 * PI).abs() < 1e-9).collect();
    assert_eq!(flat.len(), 1);
    assert_eq!(flat[0].members.len(), 3);
}

#[test]
fn latin_cross_has_four_cones() {
    let a = angles(&generate::latin_cross());
    let want = [PI / 2.0, PI, PI, 1.5 * PI];
    assert!(a.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-12), "{a:?}");
}

#[test]
fn tetrahedron_has_four_angle_pi_cones() {
    let a = angles(&generate::tetrahedron());
    assert_eq!(a.len(), 4);
    assert!(a.iter().all(|x| (x - PI).abs() < 1e-12));
}

#[test]
fn hexagon_surface() {
    let r = refine(&generate::hexagon(), &tol()).unwrap();
    let s = Surface::build(&r).unwrap();
    assert_eq!(s.face_count(), 4);
    assert_eq!(s.euler_characteristic(), 2);
    for v in 0..s.vertex_count() {
        let from_charts = s.vertex_angle(v).unwrap();
        let class = r.classes.iter().map(|c| c.angle).collect::<Vec<_>>()[v];
        assert!((from_charts - class).abs() <= 1e-9 * class);
    }
}

#[test]
fn square_surface_counts_and_angles() {
    let r = refine(&generate::square_diagonal(), &tol()).unwrap();
    let s = Surface::build(&r).unwrap();
    assert_eq!((s.vertex_count(), s.edge_count(), s.face_count()), (3, 3, 2));
    let v = s.cone_vertex(0);
    let h = s.reference_halfedge(v);
    assert_eq!(s.angle_of_direction(v, Direction::Halfedge(h)).unwrap(), 0.0);
    let dump: serde_json::Value = serde_json::from_str(&s.debug_dump()).unwrap();
    assert_eq!(dump["euler_characteristic"], 2);
}
