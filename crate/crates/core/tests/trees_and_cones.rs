use std::sync::Arc;

use num_traits::Signed;
use polybuild::cone_building::{Cone, ConePoint};
use polybuild::scalar::Rational;
use polybuild::spherical_building::{build_spherical, BPoint, BuildingGraph, BuildingSpec};
use polybuild::trees::{End, Tree, TreePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_cone(x: &TreePoint<f64>) -> ConePoint {
    match x.path.first() {
        Some(&l) => ConePoint::new(BPoint::Vertex(l as usize), x.depth),
        None => ConePoint::TIP,
    }
}

#[test]
fn spider_is_the_cone_over_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for q in [3u32, 4, 6] {
        let spider: Tree<f64> = Tree::spider(q).unwrap();
        let cone = Cone::new(Arc::new(BuildingGraph::points(q as usize).unwrap()));
        for _ in 0..2000 {
            let x = spider.random_point(&mut rng, 4, 8);
            let y = spider.random_point(&mut rng, 4, 8);
            let xi = spider.random_end(&mut rng, 1);
            let v = BPoint::Vertex(xi.anchor[0] as usize);
            assert!((spider.distance(&x, &y) - cone.distance(&to_cone(&x), &to_cone(&y))).abs() < 1e-12);
            assert!((spider.busemann(&xi, &x) - cone.busemann(&v, &to_cone(&x))).abs() < 1e-12);
            let t = rng.gen_range(0.0..3.0);
            let a = to_cone(&spider.phi(&xi, t, &x));
            let b = cone.phi(&v, t, &to_cone(&x));
            assert!(cone.distance(&a, &b) < 1e-12, "{x:?} {xi:?} {t}");
        }
    }
}

fn rational_instances(tree: &Tree<Rational>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = Rational::from_integer(0);
    for _ in 0..3000 {
        let (x, y, z) = (tree.random_point(&mut rng, 5, 6), tree.random_point(&mut rng, 5, 6), tree.random_point(&mut rng, 5, 6));
        let xi = tree.random_end(&mut rng, 5);
        let t = Rational::new(rng.gen_range(0..18), 6);
        let s = Rational::new(rng.gen_range(0..18), 6);
        let (dxy, dyz, dxz) = (tree.distance(&x, &y), tree.distance(&y, &z), tree.distance(&x, &z));
        assert_eq!(dxy, tree.distance(&y, &x));
        assert!(dxy >= zero);
        assert_eq!(tree.distance(&x, &x), zero);
        assert!(dxz <= dxy + dyz);
        // phi is 1-Lipschitz, a semigroup, and lowers the Busemann function at unit speed
        let (px, py) = (tree.phi(&xi, t, &x), tree.phi(&xi, t, &y));
        assert!(tree.distance(&px, &py) <= dxy);
        assert_eq!(tree.phi(&xi, s + t, &x), tree.phi(&xi, t, &tree.phi(&xi, s, &x)));
        assert_eq!(tree.busemann(&xi, &px), tree.busemann(&xi, &x) - t);
        // midpoints: CAT(0) comparison, with equality on geodesics
        let m = tree.midpoint(&y, &z);
        let lhs = tree.distance(&x, &m) * tree.distance(&x, &m);
        let half = Rational::new(1, 2);
        let quarter = Rational::new(1, 4);
        assert!(lhs <= half * dxy * dxy + half * dxz * dxz - quarter * dyz * dyz);
        assert_eq!(tree.distance(&y, &m), dyz * half);
        // Busemann functions are 1-Lipschitz and convex along geodesics
        assert!((tree.busemann(&xi, &x) - tree.busemann(&xi, &y)).abs() <= dxy);
        let b = |u: Rational| tree.busemann(&xi, &tree.geodesic_point(&x, &y, u).unwrap());
        let u = dxy * Rational::new(rng.gen_range(1..8), 8);
        let h = (dxy - u).min(u);
        assert!(b(u - h) + b(u + h) - b(u) - b(u) >= zero);
    }
}

#[test]
fn exact_invariants_on_regular_trees() {
    rational_instances(&Tree::regular(3).unwrap(), 22);
    rational_instances(&Tree::regular(5).unwrap(), 23);
    rational_instances(&Tree::spider(4).unwrap(), 24);
}

#[test]
fn materialized_vertices_are_thick() {
    let tree: Tree<Rational> = Tree::regular(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..200 {
        let x = tree.random_point(&mut rng, 6, 2);
        let xi = tree.random_end(&mut rng, 6);
        let y = tree.phi(&xi, Rational::from_integer(3), &x);
        for k in 0..=y.path.len() {
            tree.branches(&y.path[..k]);
        }
    }
    assert!(tree.materialized_count() > 1);
    for v in tree.materialized_vertices() {
        assert!(tree.branches(&v).len() >= 3, "{v:?}");
    }
    assert!(Tree::<Rational>::regular(2).is_err());
}

#[test]
fn tree_ends_are_canonical() {
    let tree: Tree<Rational> = Tree::regular(4).unwrap();
    assert_eq!(tree.end(vec![2, 0, 0]).unwrap(), End { anchor: vec![2] });
    assert!(tree.end(vec![4]).is_err());
}

#[test]
fn cone_busemann_is_convex_along_geodesics() {
    let b = Arc::new(build_spherical(&BuildingSpec::named("gq22")).unwrap());
    let cone = Cone::new(b.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..3000 {
        let x = ConePoint::new(b.random_point(&mut rng), rng.gen_range(0.0..3.0));
        let y = ConePoint::new(b.random_point(&mut rng), rng.gen_range(0.0..3.0));
        let xi = b.random_point(&mut rng);
        let d = cone.distance(&x, &y);
        let f = |t: f64| cone.busemann(&xi, &cone.geodesic_point(&x, &y, t).unwrap());
        let steps = 16;
        let h = d / steps as f64;
        for k in 1..steps {
            let t = k as f64 * h;
            assert!(f(t - h) + f(t + h) - 2.0 * f(t) >= -1e-9);
        }
        assert!((f(0.0) - f(d)).abs() <= d + 1e-12);
    }
}
