use std::sync::Arc;

use polybuild::cone_building::{Cone, ConePoint};
use polybuild::configurations::WeightedConfiguration;
use polybuild::polygons::{
    close_polygon, embed_transfer, gauss_map, image_refined_lengths, random_cone_polygon, side_lengths,
    transfer_polygon, verify_gauss_semistable, Ambient, ClosureOptions, ClosureStatus, Polygon,
};
use polybuild::scalar::Rational;
use polybuild::spherical_building::{build_spherical, BPoint, BuildingSpec};
use polybuild::trees::{Tree, TreePoint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cone(kind: &str) -> Cone {
    Cone::new(Arc::new(build_spherical(&BuildingSpec::named(kind)).unwrap()))
}

#[test]
fn gauss_masses_are_side_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for kind in ["fano", "gq22", "points:4"] {
        let c = cone(kind);
        for _ in 0..200 {
            let n = rng.gen_range(1..6);
            let p = random_cone_polygon(&c, &mut rng, n, 3.0);
            let maps = gauss_map(&c, &p);
            let (delta, _) = side_lengths(&c, &p);
            for k in 0..n {
                let (x, y) = p.side(k);
                assert!((maps.masses[k] - c.distance(x, y)).abs() < 1e-12);
                assert!((maps.masses[k] - delta[k].length).abs() < 1e-12);
            }
            let w = WeightedConfiguration::new(c.building().clone(), maps.canonical()).delta_weights();
            for k in 0..n {
                if delta[k].length > 1e-9 {
                    assert!((w[k].theta - delta[k].theta).abs() < 1e-9, "{kind} side {k}: {:?} {:?}", w[k], delta[k]);
                }
            }
        }
    }
}

#[test]
fn closed_gauss_configurations_close_again() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let opts = ClosureOptions::default();
    for kind in ["fano", "points:3", "complete_bipartite:3,3"] {
        let c = cone(kind);
        for _ in 0..30 {
            let n = rng.gen_range(2..6);
            let p = random_cone_polygon(&c, &mut rng, n, 2.0);
            let entries = gauss_map(&c, &p).canonical();
            let r = close_polygon(&c, &entries, ConePoint::TIP, &opts);
            assert_eq!(r.status, ClosureStatus::FixedPoint, "{kind} {:?}", r.note);
            assert!(r.displacement <= opts.tol);
            assert!(r.closure_gap <= n as f64 * opts.tol);
            let q = r.polygon.unwrap();
            let (delta, _) = side_lengths(&c, &q);
            let (want, _) = side_lengths(&c, &p);
            for k in 0..n {
                assert!((delta[k].length - want[k].length).abs() < 1e-6);
                if want[k].length > 1e-6 {
                    assert!((delta[k].theta - want[k].theta).abs() < 1e-6);
                }
            }
            let rep = verify_gauss_semistable(&c, &q, 1e-6, 8, 256, &mut rng);
            assert!(rep.ok, "{rep:?}");
        }
    }
}

#[test]
fn averaged_displacements_do_not_increase() {
    let c = cone("points:3");
    let entries: Vec<(BPoint, f64)> = vec![(BPoint::Vertex(0), 2.0), (BPoint::Vertex(1), 1.0), (BPoint::Vertex(2), 1.0)];
    let opts = ClosureOptions { checkpoint: 1, stall_window: 2, ..ClosureOptions::default() };
    let r = close_polygon(&c, &entries, ConePoint::new(BPoint::Vertex(1), 5.0), &opts);
    assert_eq!(r.status, ClosureStatus::FixedPoint);
    for w in r.tail_trend.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{:?}", r.tail_trend);
    }
}

#[test]
fn small_budget_is_inconclusive() {
    let c = cone("points:3");
    let entries: Vec<(BPoint, f64)> = vec![(BPoint::Vertex(0), 2.0), (BPoint::Vertex(1), 1.0), (BPoint::Vertex(2), 1.0)];
    let start = ConePoint::new(BPoint::Vertex(1), 50.0);
    let r = close_polygon(&c, &entries, start, &ClosureOptions { max_iter: 1, ..ClosureOptions::default() });
    assert_eq!(r.status, ClosureStatus::Inconclusive);
    assert_eq!(r.iterations, 1);
    assert!(r.displacement > 1e-9);
    assert!(r.note.unwrap().contains("budget"));
    assert!(r.polygon.is_none());
    let long = close_polygon(&c, &entries, start, &ClosureOptions::default());
    assert_eq!(long.status, ClosureStatus::FixedPoint);
}

fn tree_polygon(t: &Tree<Rational>, rng: &mut ChaCha8Rng, n: usize) -> Polygon<TreePoint<Rational>> {
    Polygon::new((0..n).map(|_| t.random_point(rng, 4, 4)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfer_preserves_refined_lengths(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t3, t4, t6) = (Tree::<Rational>::regular(3).unwrap(), Tree::<Rational>::regular(4).unwrap(), Tree::<Rational>::regular(6).unwrap());
        for (a, b) in [(&t3, &t4), (&t4, &t3), (&t6, &t3)] {
            let p = tree_polygon(a, &mut rng, n);
            let q = transfer_polygon(a, &p, b).unwrap();
            prop_assert_eq!(q.len(), n);
            prop_assert_eq!(side_lengths(a, &p).1, side_lengths(b, &q).1);
        }
        let (s3, s5) = (Tree::<Rational>::spider(3).unwrap(), Tree::<Rational>::spider(5).unwrap());
        let p = tree_polygon(&s5, &mut rng, n);
        let q = transfer_polygon(&s5, &p, &s3).unwrap();
        prop_assert_eq!(side_lengths(&s5, &p).1, side_lengths(&s3, &q).1);
        let e = embed_transfer(&s5, &p, &t3).unwrap();
        prop_assert_eq!(image_refined_lengths(&s5, &p, &t3), side_lengths(&t3, &e).1);
        prop_assert!(transfer_polygon(&s5, &p, &t3).is_err());
    }

    #[test]
    fn tree_polygons_have_semistable_gauss_maps(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Tree::<Rational>::regular(3).unwrap();
        let p = tree_polygon(&t, &mut rng, n);
        let rep = verify_gauss_semistable(&t, &p, 1e-9, 8, 4096, &mut rng);
        prop_assert!(rep.ok, "{:?}", rep);
        let maps = gauss_map(&t, &p);
        for k in 0..n {
            let (x, y) = p.side(k);
            prop_assert_eq!(maps.masses[k], t.distance(x, y));
            for xi in &maps.choices[k] {
                if maps.masses[k] > Rational::from_integer(0) {
                    prop_assert_eq!(t.busemann(xi, y), t.busemann(xi, x) - maps.masses[k]);
                }
            }
        }
        prop_assert_eq!(Ambient::base_point(&t), t.root());
    }
}
