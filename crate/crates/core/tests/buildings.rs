use std::f64::consts::PI;
use std::sync::Arc;

use polybuild::configurations::{ConfigSpec, Stability, WeightedConfiguration};
use polybuild::spherical_building::{build_spherical, BPoint, BuildingError, BuildingGraph, BuildingSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn named(kind: &str) -> Arc<BuildingGraph> {
    Arc::new(build_spherical(&BuildingSpec::named(kind)).unwrap())
}

fn all_named() -> Vec<Arc<BuildingGraph>> {
    ["points:3", "points:5", "complete_bipartite:3,4", "fano", "pg23", "gq22"].into_iter().map(named).collect()
}

#[test]
fn explicit_hexagon_fails_thickness_only() {
    let vertices: Vec<_> = (0..6).map(|i| json!({"id": format!("v{i}"), "type": i % 2})).collect();
    let edges: Vec<_> = (0..6).map(|i| json!([format!("v{i}"), format!("v{}", (i + 1) % 6)])).collect();
    let spec: BuildingSpec = serde_json::from_value(json!({"m": 3, "vertices": vertices, "edges": edges})).unwrap();
    match build_spherical(&spec) {
        Err(BuildingError::Validation(f)) => {
            assert_eq!(f.len(), 1, "{f:?}");
            assert!(f[0].contains("thick"), "{f:?}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn apartment_isometry() {
    for b in all_named().into_iter().filter(|b| b.dim() == 1) {
        let aps = b.apartments();
        let m = b.m() as usize;
        for ap in aps.iter().take(40) {
            assert_eq!(ap.vertices.len(), 2 * m);
            for i in 0..2 * m {
                for j in 0..2 * m {
                    let arc = (i as i64 - j as i64).unsigned_abs() as usize;
                    let circ = arc.min(2 * m - arc) as f64 * PI / m as f64;
                    let d = b.tits_distance(&BPoint::Vertex(ap.vertices[i]), &BPoint::Vertex(ap.vertices[j]));
                    assert!((d - circ.min(PI)).abs() < 1e-12);
                }
            }
        }
    }
    assert_eq!(named("fano").apartments().len(), 28);
}

#[test]
fn sampled_metric_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for b in all_named() {
        for _ in 0..2000 {
            let (p, q, r) = (b.random_point(&mut rng), b.random_point(&mut rng), b.random_point(&mut rng));
            let (pq, qp) = (b.tits_distance(&p, &q), b.tits_distance(&q, &p));
            assert_eq!(pq, qp);
            assert!((0.0..=PI).contains(&pq));
            assert_eq!(b.tits_distance(&p, &p), 0.0);
            assert!(b.tits_distance(&p, &r) <= pq + b.tits_distance(&q, &r) + 1e-12);
            assert!((b.accordion(&p) - b.accordion(&q)).abs() <= pq + 1e-12);
            if b.dim() == 1 && pq < PI - 1e-9 {
                let mid = b.geodesic_point(&p, &q, pq / 2.0).unwrap();
                assert!((b.tits_distance(&p, &mid) - pq / 2.0).abs() < 1e-9);
                assert!((b.tits_distance(&mid, &q) - pq / 2.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn every_point_has_an_antipode() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for b in all_named() {
        for _ in 0..300 {
            let p = b.random_point(&mut rng);
            let anti = b.points_at_distance(&p, PI);
            assert!(!anti.is_empty(), "{p:?}");
            for a in anti {
                assert!((b.tits_distance(&p, &a) - PI).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn stability_example_three_collinear_points() {
    let fano = named("fano");
    // a line vertex and its three point neighbours
    let line = (0..fano.vertex_count()).find(|&v| fano.vertex_type(v) == 1).unwrap();
    let pts: Vec<usize> = fano.neighbors(line).collect();
    let cfg = WeightedConfiguration::new(fano.clone(), pts.iter().map(|&p| (BPoint::Vertex(p), 1.0)).collect());
    let rep = cfg.min_slope();
    assert!((rep.min_slope + 1.5).abs() < 1e-12);
    assert_eq!(rep.classification, Stability::Unstable);
    assert_eq!(rep.argmin, BPoint::Vertex(line));
}

#[test]
fn config_spec_loads_from_json() {
    let doc = json!({
        "building": "points:4",
        "entries": [{"at": {"vertex": 0}, "mass": 1.0}, {"at": {"vertex": 2}, "mass": 1.0}]
    });
    let spec: ConfigSpec = serde_json::from_value(doc).unwrap();
    let cfg = spec.load().unwrap();
    assert_eq!(cfg.min_slope().classification, Stability::SemistableNotStable);
    let back: ConfigSpec = serde_json::from_value(serde_json::to_value(cfg.to_spec()).unwrap()).unwrap();
    assert_eq!(back.load().unwrap(), cfg);
}

fn config(b: &Arc<BuildingGraph>, rng: &mut ChaCha8Rng) -> WeightedConfiguration {
    let n = rng.gen_range(1..=6);
    WeightedConfiguration::new(b.clone(), (0..n).map(|_| (b.random_point(rng), rng.gen_range(0.0..2.0))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slope_bounds_lipschitz_and_scaling(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in [named("fano"), named("gq22"), named("points:4")] {
            let cfg = config(&b, &mut rng);
            let mass = cfg.total_mass();
            for _ in 0..20 {
                let (e, f) = (b.random_point(&mut rng), b.random_point(&mut rng));
                let (se, sf) = (cfg.slope_at(&e), cfg.slope_at(&f));
                prop_assert!(se.abs() <= mass + 1e-12);
                prop_assert!((se - sf).abs() <= mass * b.tits_distance(&e, &f) + 1e-9);
            }
            let rep = cfg.min_slope();
            let scaled = cfg.scaled(c).min_slope();
            prop_assert!((scaled.min_slope - c * rep.min_slope).abs() <= 1e-9 * (1.0 + c * mass));
            if rep.min_slope.abs() > 1e-6 {
                prop_assert_eq!(scaled.classification, rep.classification);
            }
            prop_assert!((cfg.slope_at(&rep.argmin) - rep.min_slope).abs() <= 1e-9);
        }
    }
}
