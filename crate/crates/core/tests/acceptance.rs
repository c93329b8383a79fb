use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use polybuild::cone_building::{Cone, ConePoint};
use polybuild::configurations::{Stability, WeightedConfiguration};
use polybuild::coxeter::DeltaVector;
use polybuild::polygons::{
    close_polygon, random_cone_polygon, side_lengths, transfer_polygon, verify_gauss_semistable, Ambient,
    ClosureOptions, ClosureStatus, Polygon,
};
use polybuild::scalar::Rational;
use polybuild::spherical_building::{build_spherical, BPoint, BuildingGraph, BuildingSpec};
use polybuild::trees::{End, Tree, TreePoint};
use polybuild::weightspace::{compare_buildings, membership};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn named(kind: &str) -> Arc<BuildingGraph> {
    Arc::new(build_spherical(&BuildingSpec::named(kind)).expect("standard building"))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn within(elapsed: Duration, limit: Duration) -> String {
    format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64())
}

/// Dim-0 law: semistable iff the heaviest atom carries at most half the mass, stable iff strictly less.
fn dim_zero_law() -> Outcome {
    let limit = Duration::from_secs(1);
    let start = Instant::now();
    let mut rng = rng(1);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let k = rng.gen_range(3..=6);
        let b = Arc::new(BuildingGraph::points(k).unwrap());
        let n = rng.gen_range(1..=6);
        let entries: Vec<(BPoint, f64)> = (0..n)
            .map(|_| (BPoint::Vertex(rng.gen_range(0..k)), rng.gen_range(0..=5) as f64))
            .collect();
        let mut atom = vec![0.0; k];
        for (p, m) in &entries {
            if let BPoint::Vertex(v) = p {
                atom[*v] += m;
            }
        }
        let total: f64 = atom.iter().sum();
        let heaviest = atom.iter().cloned().fold(0.0, f64::max);
        let expected = if 2.0 * heaviest < total {
            Stability::Stable
        } else if 2.0 * heaviest == total {
            Stability::SemistableNotStable
        } else {
            Stability::Unstable
        };
        let got = WeightedConfiguration::new(b, entries).min_slope().classification;
        if got != expected {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && elapsed < limit,
        detail: format!("1000 mass vectors, {mismatches} mismatches, {}", within(elapsed, limit)),
    }
}

struct GaussTally {
    polygons: usize,
    failures: usize,
    configurations: usize,
    inequalities: usize,
    canonical_only: usize,
    worst: f64,
}

fn gauss_tally<A: Ambient>(space: &A, polygons: &[Polygon<A::Point>], rng: &mut ChaCha8Rng) -> GaussTally {
    let mut t = GaussTally { polygons: 0, failures: 0, configurations: 0, inequalities: 0, canonical_only: 0, worst: f64::INFINITY };
    for p in polygons {
        let rep = verify_gauss_semistable(space, p, 1e-9, 16, 1 << 20, rng);
        t.polygons += 1;
        t.failures += usize::from(!rep.ok);
        t.configurations += rep.configurations_checked;
        t.inequalities += rep.inequalities_checked;
        t.canonical_only += usize::from(rep.total_configurations as usize != rep.configurations_checked);
        t.worst = t.worst.min(rep.min_slope);
    }
    t
}

fn tree_polygons(tree: &Tree<Rational>, rng: &mut ChaCha8Rng, count: usize) -> Vec<Polygon<TreePoint<Rational>>> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            Polygon::new((0..n).map(|_| tree.random_point(rng, 4, 4)).collect())
        })
        .collect()
}

/// Every Gauss configuration of a closed polygon is semistable, and the per-side Busemann inequalities hold.
fn gauss_semistability() -> Outcome {
    let limit = Duration::from_secs(30);
    let start = Instant::now();
    let mut rng = rng(2);
    let spider: Tree<Rational> = Tree::spider(3).unwrap();
    let regular: Tree<Rational> = Tree::regular(3).unwrap();
    let cone = Cone::new(named("fano"));
    let ps = tree_polygons(&spider, &mut rng, 200);
    let a = gauss_tally(&spider, &ps, &mut rng);
    let ps = tree_polygons(&regular, &mut rng, 200);
    let b = gauss_tally(&regular, &ps, &mut rng);
    let ps: Vec<_> = (0..200)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            random_cone_polygon(&cone, &mut rng, n, 3.0)
        })
        .collect();
    let c = gauss_tally(&cone, &ps, &mut rng);
    let elapsed = start.elapsed();
    let all = [&a, &b, &c];
    let failures: usize = all.iter().map(|t| t.failures).sum();
    let partial: usize = all.iter().map(|t| t.canonical_only).sum();
    let polygons: usize = all.iter().map(|t| t.polygons).sum();
    Outcome {
        pass: failures == 0 && partial == 0 && elapsed < limit,
        detail: format!(
            "{polygons} polygons (spider3, 3-regular, Cone(fano)), {} Gauss configurations, {} inequalities, \
             least min_slope {:.3e}, {failures} failures, {partial} not fully enumerated, {}",
            all.iter().map(|t| t.configurations).sum::<usize>(),
            all.iter().map(|t| t.inequalities).sum::<usize>(),
            all.iter().map(|t| t.worst).fold(f64::INFINITY, f64::min),
            within(elapsed, limit)
        ),
    }
}

/// Semistable configurations on Cone(fano) close up with the prescribed Delta-side lengths.
fn fixed_points() -> Outcome {
    let limit = Duration::from_secs(300);
    let start = Instant::now();
    let b = named("fano");
    let cone = Cone::new(b.clone());
    let mut rng = rng(3);
    let mut closed = 0;
    let mut diagnostics = Vec::new();
    let mut tried = 0;
    while tried < 100 {
        let n = rng.gen_range(3..=6);
        let entries: Vec<(BPoint, f64)> = (0..n).map(|_| (b.random_point(&mut rng), rng.gen_range(0.1..2.0))).collect();
        let cfg = WeightedConfiguration::new(b.clone(), entries.clone());
        if cfg.min_slope().min_slope < 0.0 {
            continue;
        }
        tried += 1;
        let r = close_polygon(&cone, &entries, ConePoint::TIP, &ClosureOptions::default());
        let ok = r.status == ClosureStatus::FixedPoint && r.displacement <= 1e-6 && {
            let p = r.polygon.as_ref().unwrap();
            let (sides, _) = side_lengths(&cone, p);
            sides.iter().zip(cfg.delta_weights()).all(|(s, h)| delta_close(s, &h, 1e-6))
        };
        if ok {
            closed += 1;
        } else {
            diagnostics.push(format!(
                "#{tried}: {:?} displacement {:.2e} after {} iterations, min_slope {:.2e}, note {:?}",
                r.status, r.displacement, r.iterations, r.min_slope, r.note
            ));
        }
    }
    let elapsed = start.elapsed();
    for d in &diagnostics {
        println!("    {d}");
    }
    Outcome {
        pass: closed >= 95 && elapsed < limit,
        detail: format!("{closed}/100 closed with displacement <= 1e-6 and matching Delta-sides, {}", within(elapsed, limit)),
    }
}

fn delta_close(a: &DeltaVector, b: &DeltaVector, tol: f64) -> bool {
    (a.length - b.length).abs() <= tol && (a.length.min(b.length) <= tol || (a.theta - b.theta).abs() <= tol)
}

/// On the 3-leg spider, closure succeeds exactly when the masses satisfy the polygon inequality.
fn rank_one_equivalence() -> Outcome {
    let limit = Duration::from_secs(10);
    let start = Instant::now();
    let spider: Tree<f64> = Tree::spider(3).unwrap();
    let mut rng = rng(4);
    let mut mismatches = 0;
    let mut boundary = 0;
    for i in 0..500 {
        let m: [f64; 3] = if i % 2 == 0 {
            [0; 3].map(|_| rng.gen_range(1..=6) as f64)
        } else {
            [0; 3].map(|_| rng.gen_range(0.01..3.0))
        };
        let sum: f64 = m.iter().sum();
        let max = m.iter().cloned().fold(0.0, f64::max);
        boundary += usize::from(2.0 * max == sum);
        let entries: Vec<(End, f64)> = (0..3).map(|l| (End { anchor: vec![l] }, m[l as usize])).collect();
        let r = close_polygon(&spider, &entries, spider.root(), &ClosureOptions::default());
        let closes = r.status == ClosureStatus::FixedPoint && r.displacement <= 1e-9;
        if closes != (2.0 * max <= sum) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && elapsed < limit,
        detail: format!("500 triples ({boundary} on the boundary), {mismatches} mismatches, {}", within(elapsed, limit)),
    }
}

/// Transfer between the 3- and 4-regular trees preserves refined side lengths exactly.
fn transfer() -> Outcome {
    let limit = Duration::from_secs(10);
    let start = Instant::now();
    let t3: Tree<Rational> = Tree::regular(3).unwrap();
    let t4: Tree<Rational> = Tree::regular(4).unwrap();
    let mut rng = rng(5);
    let mut preserved = 0;
    for i in 0..100 {
        let (from, to) = if i % 2 == 0 { (&t3, &t4) } else { (&t4, &t3) };
        let n = rng.gen_range(1..=6);
        let p = Polygon::new((0..n).map(|_| from.random_point(&mut rng, 5, 6)).collect());
        if let Ok(q) = transfer_polygon(from, &p, to) {
            if side_lengths(from, &p).1 == side_lengths(to, &q).1 {
                preserved += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: preserved == 100 && elapsed < limit,
        detail: format!("{preserved}/100 polygons with identical refined side lengths, {}", within(elapsed, limit)),
    }
}

/// Membership agrees on the Fano plane and PG(2,3).
fn building_independence() -> Outcome {
    let limit = Duration::from_secs(300);
    let start = Instant::now();
    let fano = named("fano");
    let pg23 = named("pg23");
    let w = fano.edge_length();
    let mut rng = rng(6);
    let mut grid: Vec<Vec<DeltaVector>> = vec![
        vec![DeltaVector::new(1.0, 0.0); 3],
        vec![DeltaVector::new(3.0, 0.0), DeltaVector::new(1.0, 0.0), DeltaVector::new(1.0, 0.0)],
    ];
    for _ in 0..50 {
        grid.push(
            (0..3)
                .map(|_| DeltaVector::new(rng.gen_range(1..=4) as f64, if rng.gen_bool(0.5) { 0.0 } else { w }))
                .collect(),
        );
    }
    let hand = [true, false];
    let mut hand_ok = true;
    for (h, expect) in grid.iter().zip(hand) {
        for b in [&fano, &pg23] {
            hand_ok &= membership(h, b).unwrap().member == expect;
        }
    }
    let report = compare_buildings(&grid, &fano, &pg23).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: report.disagreements.is_empty() && hand_ok && elapsed < limit,
        detail: format!(
            "{} triples ({} members), {} disagreements, hand examples {}, {}",
            report.checked,
            report.members,
            report.disagreements.len(),
            if hand_ok { "as expected" } else { "WRONG" },
            within(elapsed, limit)
        ),
    }
}

/// Geometry invariants on sampled instances.
fn invariant_suite() -> Outcome {
    const N: usize = 10_000;
    let limit = Duration::from_secs(120);
    let start = Instant::now();
    let b = named("fano");
    let cone = Cone::new(b.clone());
    let mut rng = rng(7);
    let point = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.05) {
            ConePoint::TIP
        } else {
            ConePoint::new(b.random_point(rng), rng.gen_range(0.01..3.0))
        }
    };
    let mut violations: Vec<(&str, usize)> = Vec::new();
    let mut count = |name: &'static str, bad: usize| violations.push((name, bad));

    let mut bad = 0;
    for _ in 0..N {
        let (x, y, xi, t) = (point(&mut rng), point(&mut rng), b.random_point(&mut rng), rng.gen_range(0.0..3.0));
        if cone.distance(&cone.phi(&xi, t, &x), &cone.phi(&xi, t, &y)) > cone.distance(&x, &y) + 1e-12 {
            bad += 1;
        }
    }
    count("phi 1-Lipschitz", bad);

    let mut bad = 0;
    for _ in 0..N {
        let (x, xi, s, t) = (point(&mut rng), b.random_point(&mut rng), rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let once = cone.phi(&xi, s + t, &x);
        let twice = cone.phi(&xi, t, &cone.phi(&xi, s, &x));
        if cone.distance(&once, &twice) > 1e-12 {
            bad += 1;
        }
    }
    count("phi semigroup", bad);

    let mut bad = 0;
    for _ in 0..N {
        let (x, xi, t) = (point(&mut rng), b.random_point(&mut rng), rng.gen_range(0.0..3.0));
        if (cone.busemann(&xi, &cone.phi(&xi, t, &x)) - (cone.busemann(&xi, &x) - t)).abs() > 1e-12 {
            bad += 1;
        }
    }
    count("Busemann slope -1 along rays", bad);

    let mut bad = 0;
    for _ in 0..N {
        let (xi, eta, t) = (b.random_point(&mut rng), b.random_point(&mut rng), rng.gen_range(0.1..10.0));
        let lhs = cone.busemann(&xi, &ConePoint::new(eta, t)) / t;
        let unit = WeightedConfiguration::new(b.clone(), vec![(xi, 1.0)]).slope_at(&eta);
        let formula = -b.tits_distance(&xi, &eta).min(PI).cos();
        if (lhs - formula).abs() > 1e-12 || (unit - formula).abs() > 1e-12 {
            bad += 1;
        }
    }
    count("asymptotic slope", bad);

    let mut bad = 0;
    for _ in 0..N {
        let (x, y, z) = (point(&mut rng), point(&mut rng), point(&mut rng));
        let m = cone.midpoint(&y, &z);
        let (dxy, dxz, dyz) = (cone.distance(&x, &y), cone.distance(&x, &z), cone.distance(&y, &z));
        let lhs = cone.distance(&x, &m).powi(2);
        let rhs = 0.5 * dxy * dxy + 0.5 * dxz * dxz - 0.25 * dyz * dyz;
        if lhs > rhs + 1e-9 {
            bad += 1;
        }
    }
    count("CAT(0) midpoint comparison", bad);

    let mut bad = 0;
    for _ in 0..N {
        let (v, w) = (b.random_point(&mut rng), b.random_point(&mut rng));
        let chord = cone.distance(&ConePoint::new(v, 1.0), &ConePoint::new(w, 1.0));
        if (chord - 2.0 * (b.tits_distance(&v, &w).min(PI) / 2.0).sin()).abs() > 1e-12 {
            bad += 1;
        }
    }
    count("boundary chord formula", bad);

    let mut bad = 0;
    for _ in 0..N {
        let (p, q, r) = (b.random_point(&mut rng), b.random_point(&mut rng), b.random_point(&mut rng));
        if b.tits_distance(&p, &r) > b.tits_distance(&p, &q) + b.tits_distance(&q, &r) + 1e-12 {
            bad += 1;
        }
    }
    count("Tits triangle inequality", bad);

    // Atoms sit on the grid so every breakpoint of the slope on an edge is a
    // grid node; masses sum to 1/2 so the grid error is below 1e-9 on smooth pieces.
    const STEPS: usize = 10_000;
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..N {
        let n = rng.gen_range(1..=4);
        let mut entries: Vec<(BPoint, f64)> = (0..n)
            .map(|_| {
                let p = if rng.gen_bool(0.4) {
                    BPoint::Vertex(rng.gen_range(0..b.vertex_count()))
                } else {
                    let k = rng.gen_range(1..STEPS / 2);
                    BPoint::Edge { edge: rng.gen_range(0..b.edge_count()), offset: (2 * k) as f64 / STEPS as f64 }
                };
                (p, rng.gen_range(0.05..1.0))
            })
            .collect();
        let total: f64 = entries.iter().map(|(_, m)| m).sum();
        for e in entries.iter_mut() {
            e.1 *= 0.5 / total;
        }
        let cfg = WeightedConfiguration::new(b.clone(), entries);
        let edge = rng.gen_range(0..b.edge_count());
        let exact = cfg.edge_minimum(edge).min_slope;
        let (u, v) = b.edges()[edge];
        let mut grid = cfg.slope_at(&BPoint::Vertex(u)).min(cfg.slope_at(&BPoint::Vertex(v)));
        for i in 1..STEPS {
            grid = grid.min(cfg.slope_at(&BPoint::Edge { edge, offset: i as f64 / STEPS as f64 }));
        }
        let gap = grid - exact;
        worst = worst.max(gap.abs());
        if !(-1e-12..=1e-9).contains(&gap) {
            bad += 1;
        }
    }
    count("min_slope closed form vs 10^4-point grid", bad);

    let elapsed = start.elapsed();
    let total: usize = violations.iter().map(|(_, v)| v).sum();
    let listing: Vec<String> = violations.iter().map(|(n, v)| format!("{n}: {v}")).collect();
    Outcome {
        pass: total == 0 && elapsed < limit,
        detail: format!(
            "8 x {N} instances, {total} violations [{}], worst grid gap {worst:.2e}, {}",
            listing.join("; "),
            within(elapsed, limit)
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 dim-0 stability law", dim_zero_law),
        ("2 Gauss semistability", gauss_semistability),
        ("3 fixed points on Cone(fano)", fixed_points),
        ("4 rank-one equivalence", rank_one_equivalence),
        ("5 transfer 3-regular <-> 4-regular", transfer),
        ("6 building independence fano/pg23", building_independence),
        ("7 geometry invariant suite", invariant_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
