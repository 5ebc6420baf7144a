use flatfold::generate::{self, CoverOptions};
use flatfold::geom::perimeter;
use flatfold::pipeline::{solve, SolveOptions};
use flatfold::rim::bisects;
use flatfold::{GluingSpec, Rigid};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn halving(seed: u64, n: usize, start: f64) -> GluingSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = generate::random_convex_polygon(&mut rng, n);
    let per = perimeter(&poly);
    generate::perimeter_halving(poly, start * per)
}

fn cover(seed: u64, n: usize, cuts: usize, collinear: usize) -> GluingSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = generate::random_convex_polygon(&mut rng, n);
    generate::double_cover(&mut rng, &q, CoverOptions { random_cuts: cuts, collinear_points: collinear })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn surface_invariants(seed in any::<u64>(), n in 3usize..10, start in 0.0f64..1.0) {
        let spec = halving(seed, n, start);
        let out = solve(&spec, &SolveOptions::default()).unwrap();
        let s = &out.surface;
        prop_assert_eq!(s.euler_characteristic(), 2);
        prop_assert!(s.gauss_bonnet_residual().abs() < s.vertex_count() as f64 * 1e-9);
        prop_assert!(s.cones.len() <= spec.vertex_count() + 4);
        // Twins are the same edge seen from both sides.
        for h in 0..s.halfedge_count() {
            let t = s.twin(h);
            prop_assert_eq!(s.twin(t), h);
            prop_assert!((s.edge_length(h) - s.edge_length(t)).abs() <= 1e-12 * s.edge_length(h).max(1.0));
            let m: Rigid = s.transition(h);
            prop_assert!(m.apply(s.tail(h)).dist(s.head(t)) <= 1e-12 * s.edge_length(h).max(1.0));
        }
        let fan_total: usize = (0..s.vertex_count()).map(|v| s.fan(v).len()).sum();
        prop_assert_eq!(fan_total, s.halfedge_count());
    }

    #[test]
    fn traces_are_straight(seed in any::<u64>(), n in 3usize..9, start in 0.0f64..1.0) {
        let spec = halving(seed, n, start);
        let out = solve(&spec, &SolveOptions::default()).unwrap();
        for p in out.sigma.all() {
            prop_assert!((p.trace_length() - p.length).abs() <= 1e-9 * p.length);
            for w in p.trace.windows(2) {
                // The exit point of one step is the entry point of the next, across the shared edge.
                let (a, b) = (&w[0], &w[1]);
                let h = (0..3).map(|k| 3 * a.face + k).find(|&h| out.surface.twin(h) / 3 == b.face
                    && flatfold::geom::point_segment_dist(a.to, out.surface.tail(h), out.surface.head(h)) <= 1e-9);
                if let Some(h) = h {
                    let image = out.surface.transition(h).apply(a.to);
                    prop_assert!(image.dist(b.from) <= 1e-9 * p.length.max(1.0));
                }
            }
        }
        for i in 0..out.surface.cones.len() {
            let deps: Vec<f64> = out.sigma.outgoing(i).iter().map(|&k| out.sigma.path(k).departure).collect();
            prop_assert!(deps.windows(2).all(|w| w[0] < w[1]), "{:?}", deps);
        }
    }

    #[test]
    fn double_covers_fold_flat(seed in any::<u64>(), n in 3usize..9, cuts in 0usize..4, collinear in 0usize..3) {
        let spec = cover(seed, n, cuts, collinear);
        let out = solve(&spec, &SolveOptions::default()).unwrap();
        let flat = out.flat.as_ref().unwrap();
        let rim = out.search.rim.as_ref().unwrap();
        let total = spec.total_area();
        prop_assert!((flat.half_areas[0] - flat.half_areas[1]).abs() <= 1e-9 * total);
        prop_assert!((flat.half_areas[0] + flat.half_areas[1] - total).abs() <= 1e-9 * total);
        let rim_length: f64 = rim.lengths(&out.sigma).iter().sum();
        prop_assert!((perimeter(&flat.polygon) - rim_length).abs() <= 1e-9 * rim_length);
        for (k, &c) in rim.order.iter().enumerate() {
            let theta = out.surface.cones[c].angle;
            prop_assert!((2.0 * flat.interior_angles[k] - theta).abs() <= 2e-7);
            prop_assert!(bisects(theta, rim.arrivals[k], rim.departures[k], 1e-7));
        }
    }
}
