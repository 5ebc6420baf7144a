//! Acceptance run: one pass/fail line per criterion. Tolerances are fixed here and never
//! taken from the library defaults.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use flatfold::generate::{self, CoverOptions};
use flatfold::geodesic::{default_depth_cap, oracle_shortest_path};
use flatfold::geom::perimeter;
use flatfold::layout::{canonical_pose, diameter};
use flatfold::pipeline::{solve, SolveOptions, SolveOutcome};
use flatfold::rim::{find_rim, same_cycle, Rejection};
use flatfold::{GluingSpec, Point, ShortestPathSet, Surface, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEN_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-7;
const CONGRUENCE_TOL: f64 = 1e-7;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn opts() -> SolveOptions {
    SolveOptions { tolerances: Tolerances { length: 1e-9, angle: 1e-7, tie: 1e-9 }, ..SolveOptions::default() }
}

fn run(spec: &GluingSpec) -> Result<SolveOutcome, String> {
    solve(spec, &opts()).map_err(|e| e.to_string())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn cli(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_flatfold")).args(args).output().ok()?.status.code()
}

fn instance(name: &str) -> String {
    format!("{}/../../instances/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn c1_square() -> Verdict {
    let t = Instant::now();
    let out = run(&generate::square_diagonal())?;
    let elapsed = t.elapsed();
    let flat = out.flat.as_ref().ok_or("verdict not_flat")?;
    let l = sorted(flat.edge_lengths.clone());
    ensure!(l.len() == 3, "{} edges", l.len());
    ensure!(close(l[0], 1.0, LEN_TOL) && close(l[1], 1.0, LEN_TOL) && close(l[2], 2f64.sqrt(), LEN_TOL), "edges {l:?}");
    for a in flat.half_areas {
        ensure!((a - 0.5).abs() <= LEN_TOL, "half area {a}");
    }
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("edges {l:?}, half areas {:?}, {elapsed:?}", flat.half_areas))
}

fn c2_hexagon() -> Verdict {
    let out = run(&generate::hexagon())?;
    let flat = out.flat.as_ref().ok_or("verdict not_flat")?;
    let side = 3f64.sqrt();
    ensure!(flat.edge_lengths.len() == 3, "{} edges", flat.edge_lengths.len());
    for &l in &flat.edge_lengths {
        ensure!(close(l, side, LEN_TOL), "side {l}");
    }
    // The side length is also read off the unfolding oracle.
    let cap = default_depth_cap(&out.surface);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let o = oracle_shortest_path(&out.surface, i, j, cap).map_err(|e| e.to_string())?;
        ensure!(close(o.length, side, LEN_TOL), "oracle ({i},{j}) {}", o.length);
    }
    for &a in &flat.interior_angles {
        ensure!((a - PI / 3.0).abs() <= ANGLE_TOL, "angle {a}");
    }
    let expected = 3.0 * 3f64.sqrt() / 4.0;
    for a in flat.half_areas {
        ensure!((a - expected).abs() <= LEN_TOL, "half area {a}");
    }
    Ok(format!("sides {:?}", flat.edge_lengths))
}

fn c3_latin_cross() -> Verdict {
    let out = run(&generate::latin_cross())?;
    let flat = out.flat.as_ref().ok_or("verdict not_flat")?;
    let rim = out.search.rim.as_ref().ok_or("no rim")?;
    let cones = &out.surface.cones;
    ensure!(cones.len() == 4 && rim.order.len() == 4, "{} cones, rim {:?}", cones.len(), rim.order);
    let with_angle =
        |theta: f64| -> Vec<usize> { (0..4).filter(|&i| (cones[i].angle - theta).abs() <= ANGLE_TOL).collect() };
    let (big, small, straight) = (with_angle(1.5 * PI), with_angle(0.5 * PI), with_angle(PI));
    ensure!(big.len() == 1 && small.len() == 1 && straight.len() == 2, "cone angles {cones:?}");
    let (a, d) = (big[0], small[0]);
    // c is the angle-π cone whose start from a is abandoned; b is the other one.
    let dead =
        |x: usize| out.search.trace.iter().any(|e| e.start == (a, x) && e.rejection == Some(Rejection::PrematureLoop));
    let dead_ends: Vec<usize> = straight.iter().copied().filter(|&x| dead(x)).collect();
    ensure!(dead_ends.len() == 1, "premature-loop starts from a: {dead_ends:?}");
    let c = dead_ends[0];
    let b = straight.iter().copied().find(|&x| x != c).expect("two angle-π cones");
    let trace_has_line = out
        .search
        .trace
        .iter()
        .map(|e| e.to_string())
        .any(|l| l.starts_with(&format!("start (v{a},v{c})")) && l.ends_with("reject premature-loop"));
    ensure!(trace_has_line, "trace lacks the (a,c) premature-loop line");
    ensure!(same_cycle(&rim.order, &[a, b, c, d]), "rim {:?} vs (a,b,c,d) = {:?}", rim.order, [a, b, c, d]);
    for x in flat.half_areas {
        ensure!((x - 3.0).abs() <= LEN_TOL, "half area {x}");
    }
    Ok(format!("rim {:?} = (a,b,c,d), half areas {:?}", rim.order, flat.half_areas))
}

fn c4_tetrahedron() -> Verdict {
    let out = run(&generate::tetrahedron())?;
    ensure!(out.surface.cones.len() == 4, "{} cones", out.surface.cones.len());
    for c in &out.surface.cones {
        ensure!((c.angle - PI).abs() <= ANGLE_TOL, "cone angle {}", c.angle);
    }
    ensure!(out.flat.is_none(), "verdict flat");
    let starts = out.sigma.outgoing(0).len();
    ensure!(out.search.starts_explored == starts, "explored {} of {starts} starts", out.search.starts_explored);
    let code = cli(&["solve", &instance("tetrahedron")]);
    ensure!(code == Some(1), "exit {code:?}");
    Ok(format!("not_flat, {starts} starts exhausted, exit 1"))
}

/// Minimum lengths and tie sets of Σ against the oracle.
fn agree(s: &Surface, sigma: &ShortestPathSet) -> Result<(), String> {
    let n = s.cones.len();
    let cap = default_depth_cap(s);
    for i in 0..n {
        let theta = s.cones[i].angle;
        for j in (0..n).filter(|&j| j != i) {
            let o = oracle_shortest_path(s, i, j, cap).map_err(|e| e.to_string())?;
            let m = sigma.min_length(i, j);
            ensure!((o.length - m).abs() <= LEN_TOL * m, "({i},{j}) oracle {} main {m}", o.length);
            let main: Vec<(f64, f64)> =
                sigma.pair(i, j).iter().map(|&k| (sigma.path(k).length, sigma.path(k).departure)).collect();
            let ora: Vec<(f64, f64)> = o.paths.iter().map(|p| (p.length, p.departure)).collect();
            ensure!(main.len() == ora.len(), "({i},{j}) tie sets {main:?} vs {ora:?}");
            for x in &main {
                let hit = ora.iter().any(|y| {
                    let d = (x.1 - y.1).abs();
                    (x.0 - y.0).abs() <= LEN_TOL * x.0 && d.min(theta - d) <= ANGLE_TOL
                });
                ensure!(hit, "({i},{j}) tie sets {main:?} vs {ora:?}");
            }
        }
    }
    Ok(())
}

fn goldens() -> Vec<(&'static str, GluingSpec)> {
    vec![
        ("square", generate::square_diagonal()),
        ("hexagon", generate::hexagon()),
        ("latin cross", generate::latin_cross()),
        ("tetrahedron", generate::tetrahedron()),
    ]
}

fn halving_family(count: usize, seed: u64) -> Vec<GluingSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=10);
            let poly = generate::random_convex_polygon(&mut rng, n);
            let start = rng.gen_range(0.0..perimeter(&poly));
            generate::perimeter_halving(poly, start)
        })
        .collect()
}

fn c5_oracle() -> Verdict {
    let mut checked = 0;
    for (name, spec) in goldens() {
        let out = run(&spec)?;
        agree(&out.surface, &out.sigma).map_err(|e| format!("{name}: {e}"))?;
        checked += 1;
    }
    let mut fuzzed = 0;
    for (k, spec) in halving_family(110, 5).iter().enumerate() {
        let out = run(spec).map_err(|e| format!("fuzz {k}: {e}"))?;
        ensure!(out.surface.cones.len() <= 12, "fuzz {k}: {} cones", out.surface.cones.len());
        agree(&out.surface, &out.sigma).map_err(|e| format!("fuzz {k}: {e}"))?;
        fuzzed += 1;
    }
    ensure!(fuzzed >= 100, "only {fuzzed} fuzz cases");
    Ok(format!("{checked} goldens + {fuzzed} fuzzed instances agree"))
}

fn c6_invariants() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut specs: Vec<GluingSpec> = goldens().into_iter().map(|(_, s)| s).collect();
    specs.extend(halving_family(40, 66));
    for _ in 0..20 {
        let n = rng.gen_range(3..=9);
        let q = generate::random_convex_polygon(&mut rng, n);
        specs.push(generate::double_cover(&mut rng, &q, CoverOptions { random_cuts: 3, collinear_points: 2 }));
    }
    for (k, spec) in specs.iter().enumerate() {
        let out = run(spec).map_err(|e| format!("instance {k}: {e}"))?;
        let s = &out.surface;
        let n = s.cones.len();
        let residual = s.gauss_bonnet_residual();
        ensure!(residual.abs() < n as f64 * 1e-9, "instance {k}: Gauss-Bonnet residual {residual}");
        ensure!(s.euler_characteristic() == 2, "instance {k}: Euler characteristic {}", s.euler_characteristic());
        ensure!(n <= spec.vertex_count() + 4, "instance {k}: {n} cones from {} vertices", spec.vertex_count());
        let d = |i: usize, j: usize| out.sigma.min_length(i, j);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                ensure!((d(i, j) - d(j, i)).abs() <= LEN_TOL * d(i, j), "instance {k}: asymmetric ({i},{j})");
                for m in (0..n).filter(|&m| m != i && m != j) {
                    ensure!(d(i, j) <= (d(i, m) + d(m, j)) * (1.0 + LEN_TOL), "instance {k}: triangle ({i},{m},{j})");
                }
            }
        }
    }
    Ok(format!("{} instances", specs.len()))
}

/// Smallest vertex distance between `p` and the generator `q` over every starting
/// vertex and both orientations, both in canonical pose.
fn congruence_error(p: &[Point], q: &[Point]) -> f64 {
    let target = canonical_pose(p);
    let n = q.len();
    let mirrored: Vec<Point> = q.iter().rev().map(|v| Point::new(v.x, -v.y)).collect();
    let mut best = f64::INFINITY;
    for base in [q.to_vec(), mirrored] {
        for shift in 0..n {
            let cand: Vec<Point> = (0..n).map(|k| base[(shift + k) % n]).collect();
            let cand = canonical_pose(&cand);
            let err = target.iter().zip(&cand).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
            best = best.min(err);
        }
    }
    best
}

fn c7_flat_family() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    let cases = 60;
    for k in 0..cases {
        let n = rng.gen_range(3..=10);
        let q = generate::random_convex_polygon(&mut rng, n);
        let opts = CoverOptions { random_cuts: rng.gen_range(0..=4), collinear_points: rng.gen_range(0..=3) };
        let spec = generate::double_cover(&mut rng, &q, opts);
        let out = run(&spec).map_err(|e| format!("case {k}: {e}"))?;
        let flat = out.flat.as_ref().ok_or(format!("case {k}: not_flat"))?;
        ensure!(flat.polygon.len() == n, "case {k}: {} vertices for an {n}-gon", flat.polygon.len());
        let err = congruence_error(&flat.polygon, &q);
        let tol = CONGRUENCE_TOL * diameter(&q);
        ensure!(err <= tol, "case {k}: off by {err} (tolerance {tol})");
        worst = worst.max(err / diameter(&q));
    }
    Ok(format!("{cases} double covers, worst relative error {worst:.1e}"))
}

fn c8_start_independence() -> Verdict {
    for (name, spec) in goldens().into_iter().filter(|(n, _)| *n != "tetrahedron") {
        let out = run(&spec)?;
        let reference = out.search.rim.as_ref().ok_or(format!("{name}: no rim"))?;
        for first in 0..out.surface.cones.len() {
            let again = find_rim(&out.surface, &out.sigma, first);
            let rim = again.rim.ok_or(format!("{name}: no rim from v{first}"))?;
            ensure!(
                same_cycle(&rim.order, &reference.order),
                "{name}: {:?} from v{first} vs {:?}",
                rim.order,
                reference.order
            );
        }
    }
    Ok("square, hexagon, latin cross".into())
}

fn double_cover_of(n: usize, seed: u64) -> GluingSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = generate::random_convex_polygon(&mut rng, n);
    generate::double_cover(&mut rng, &q, CoverOptions { random_cuts: 0, collinear_points: 0 })
}

fn median_time(spec: &GluingSpec, runs: usize) -> Result<Duration, String> {
    let mut times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let t = Instant::now();
        let out = run(spec)?;
        times.push(t.elapsed());
        ensure!(out.flat.is_some(), "{} cones: not_flat", out.surface.cones.len());
    }
    times.sort();
    Ok(times[runs / 2])
}

fn c9_scale() -> Verdict {
    let big = double_cover_of(30, 9);
    let t = Instant::now();
    let out = run(&big)?;
    let t30_once = t.elapsed();
    ensure!(out.surface.cones.len() == 30, "{} cones", out.surface.cones.len());
    ensure!(out.flat.is_some(), "30-gon: not_flat");
    ensure!(t30_once < Duration::from_secs(10), "30 cones took {t30_once:?}");
    let t10 = median_time(&double_cover_of(10, 9), 5)?;
    let t30 = median_time(&big, 3)?;
    let ratio = t30.as_secs_f64() / t10.as_secs_f64();
    let bound = 4.0 * 27.0;
    ensure!(ratio <= bound, "t30/t10 = {ratio:.1} exceeds {bound}");
    Ok(format!("n=30 in {t30_once:?}; t30/t10 = {ratio:.1} (cubic 27, bound {bound})"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("square-diagonal golden", c1_square),
        ("hexagon golden", c2_hexagon),
        ("latin cross golden", c3_latin_cross),
        ("non-flat golden", c4_tetrahedron),
        ("oracle equivalence", c5_oracle),
        ("invariant suite", c6_invariants),
        ("flat family", c7_flat_family),
        ("start independence", c8_start_independence),
        ("scale check", c9_scale),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
