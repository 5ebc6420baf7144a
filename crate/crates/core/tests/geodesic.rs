use flatfold::generate::{self, CoverOptions};
use flatfold::geodesic::{all_pairs, default_depth_cap, oracle_shortest_path, ShortestPathSet};
use flatfold::gluing::{check_alexandrov, refine, GluingSpec};
use flatfold::{Surface, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn build(spec: &GluingSpec) -> Surface {
    let tol = Tolerances::default();
    let r = refine(spec, &tol).unwrap();
    assert!(check_alexandrov(&r).all_pass());
    Surface::build(&r).unwrap()
}

/// Compares Σ against the oracle pair by pair: minimum lengths and tie sets.
fn agree(s: &Surface, sigma: &ShortestPathSet) {
    let n = s.cones.len();
    let cap = default_depth_cap(s);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let o = oracle_shortest_path(s, i, j, cap).unwrap();
            let m = sigma.min_length(i, j);
            assert!((o.length - m).abs() <= 1e-9 * m, "pair ({i},{j}): oracle {} main {}", o.length, m);
            let a: Vec<(f64, f64)> =
                sigma.pair(i, j).iter().map(|&k| (sigma.path(k).length, sigma.path(k).departure)).collect();
            let b: Vec<(f64, f64)> = o.paths.iter().map(|p| (p.length, p.departure)).collect();
            assert_eq!(a.len(), b.len(), "tie sets differ for ({i},{j}): main {a:?} oracle {b:?}");
            let theta = s.cones[i].angle;
            for x in &a {
                let matched = b.iter().any(|y| {
                    let d = (x.1 - y.1).abs();
                    (x.0 - y.0).abs() <= 1e-9 * x.0 && d.min(theta - d) <= 1e-7
                });
                assert!(matched, "({i},{j}): {a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn hexagon_alternate_vertices() {
    let s = build(&generate::hexagon());
    let sigma = all_pairs(&s).unwrap();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        assert!((sigma.min_length(i, j) - 3f64.sqrt()).abs() < 1e-12);
    }
    agree(&s, &sigma);
}

#[test]
fn goldens_match_oracle() {
    for spec in [generate::square_diagonal(), generate::hexagon(), generate::latin_cross(), generate::tetrahedron()] {
        let s = build(&spec);
        agree(&s, &all_pairs(&s).unwrap());
    }
}

#[test]
fn tetrahedron_edges_have_length_one() {
    let s = build(&generate::tetrahedron());
    let sigma = all_pairs(&s).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                assert!((sigma.min_length(i, j) - 1.0).abs() < 1e-12, "{i} {j} {}", sigma.min_length(i, j));
            }
        }
    }
}

#[test]
fn halving_fuzz_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.gen_range(3..=10);
        let poly = generate::random_convex_polygon(&mut rng, n);
        let per = flatfold::geom::perimeter(&poly);
        let spec = generate::perimeter_halving(poly, rng.gen_range(0.0..per));
        let s = build(&spec);
        agree(&s, &all_pairs(&s).unwrap());
    }
}

#[test]
fn double_cover_fuzz_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(3..=9);
        let poly = generate::random_convex_polygon(&mut rng, n);
        let spec = generate::double_cover(&mut rng, &poly, CoverOptions { random_cuts: 3, collinear_points: 2 });
        let s = build(&spec);
        agree(&s, &all_pairs(&s).unwrap());
    }
}
