//! Polygons in cones over spherical buildings and in trees.
//!
//! A polygon is a cyclic list of vertices `x_1, ..., x_n` with `x_0 = x_n`;
//! side `i` runs from `x_{i-1}` to `x_i`.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::cone_building::{Cone, ConePoint};
use crate::configurations::{Stability, WeightedConfiguration};
use crate::coxeter::{DeltaVector, RefinedLength};
use crate::scalar::Scalar;
use crate::spherical_building::{BPoint, BuildingGraph};
use crate::trees::{End, Tree, TreePoint};

mod closure;
mod gauss;
mod transfer;

pub use closure::{close_polygon, ClosureOptions, ClosureResult, ClosureStatus};
pub use gauss::{gauss_map, verify_gauss_semistable, GaussMaps, GaussReport, SideViolation};
pub use transfer::{embed_transfer, image_refined_lengths, transfer_polygon, TransferError};

/// Minimum of a slope function over the boundary, located at an ideal point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryStability<I> {
    pub min_slope: f64,
    pub argmin: I,
    pub classification: Stability,
}

/// A complete CAT(0) space with the operations polygon algorithms need.
pub trait Ambient {
    type S: Scalar;
    type Point: Clone + Debug + PartialEq;
    type Ideal: Clone + Debug + PartialEq;

    fn base_point(&self) -> Self::Point;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Self::S;
    /// Point at distance `t` from `x` toward `y`, `t` clamped to the segment.
    fn geodesic_point(&self, x: &Self::Point, y: &Self::Point, t: Self::S) -> Self::Point;
    /// Point at distance `t` from `x` on the ray toward `xi`.
    fn phi(&self, xi: &Self::Ideal, t: Self::S, x: &Self::Point) -> Self::Point;
    fn busemann(&self, xi: &Self::Ideal, x: &Self::Point) -> Self::S;
    fn tits_angle(&self, a: &Self::Ideal, b: &Self::Ideal) -> f64;
    /// Type of an ideal point in the spherical chamber.
    fn ideal_type(&self, xi: &Self::Ideal) -> f64;
    /// Ideal points `xi` such that the ray from `x` to `xi` passes through `y != x`, canonical first.
    fn extensions(&self, x: &Self::Point, y: &Self::Point) -> Vec<Self::Ideal>;
    /// Ideal point used for sides of length zero.
    fn canonical_ideal(&self) -> Self::Ideal;
    fn delta_length(&self, x: &Self::Point, y: &Self::Point) -> DeltaVector;
    fn refined_length(&self, x: &Self::Point, y: &Self::Point) -> RefinedLength;
    /// Minimum of the slope of a weighted configuration of ideal points.
    fn stability(&self, entries: &[(Self::Ideal, f64)], tol: f64) -> BoundaryStability<Self::Ideal>;
    /// Ideal points for sampled inequality checks near the given polygon.
    fn sample_ideals(&self, rng: &mut dyn RngCore, polygon: &[Self::Point], count: usize) -> Vec<Self::Ideal>;

    fn midpoint(&self, x: &Self::Point, y: &Self::Point) -> Self::Point {
        self.geodesic_point(x, y, self.distance(x, y).half())
    }
}

impl Ambient for Cone {
    type S = f64;
    type Point = ConePoint;
    type Ideal = BPoint;

    fn base_point(&self) -> ConePoint {
        ConePoint::TIP
    }

    fn distance(&self, x: &ConePoint, y: &ConePoint) -> f64 {
        Cone::distance(self, x, y)
    }

    fn geodesic_point(&self, x: &ConePoint, y: &ConePoint, t: f64) -> ConePoint {
        let t = t.clamp(0.0, Cone::distance(self, x, y));
        Cone::geodesic_point(self, x, y, t).expect("parameter clamped to the segment")
    }

    fn phi(&self, xi: &BPoint, t: f64, x: &ConePoint) -> ConePoint {
        Cone::phi(self, xi, t, x)
    }

    fn busemann(&self, xi: &BPoint, x: &ConePoint) -> f64 {
        Cone::busemann(self, xi, x)
    }

    fn tits_angle(&self, a: &BPoint, b: &BPoint) -> f64 {
        self.building().tits_distance(a, b)
    }

    fn ideal_type(&self, xi: &BPoint) -> f64 {
        self.building().accordion(xi)
    }

    fn extensions(&self, x: &ConePoint, y: &ConePoint) -> Vec<BPoint> {
        cone_extensions(self, x, y)
    }

    fn canonical_ideal(&self) -> BPoint {
        BPoint::Vertex(0)
    }

    fn delta_length(&self, x: &ConePoint, y: &ConePoint) -> DeltaVector {
        Cone::delta_length(self, x, y)
    }

    fn refined_length(&self, x: &ConePoint, y: &ConePoint) -> RefinedLength {
        Cone::refined_length(self, x, y)
    }

    fn stability(&self, entries: &[(BPoint, f64)], tol: f64) -> BoundaryStability<BPoint> {
        let rep = WeightedConfiguration::new(self.building().clone(), entries.to_vec())
            .min_slope_with_tol(tol);
        BoundaryStability { min_slope: rep.min_slope, argmin: rep.argmin, classification: rep.classification }
    }

    fn sample_ideals(&self, rng: &mut dyn RngCore, _polygon: &[ConePoint], count: usize) -> Vec<BPoint> {
        let b = self.building();
        let mut out: Vec<BPoint> = b.vertices().collect();
        out.extend((0..b.edge_count()).map(|e| BPoint::Edge { edge: e, offset: 0.5 }));
        out.extend((0..count).map(|_| b.random_point(rng)));
        out
    }
}

/// Directions `xi` extending the cone segment from `x` through `y`.
fn cone_extensions(cone: &Cone, x: &ConePoint, y: &ConePoint) -> Vec<BPoint> {
    let b = cone.building();
    let antipodes = |v: &BPoint| b.points_at_distance(v, PI);
    let (v, w) = match (x.dir, y.dir) {
        (None, Some(w)) => return vec![w],
        (Some(v), None) => return antipodes(&v),
        (Some(v), Some(w)) => (v, w),
        (None, None) => return vec![],
    };
    let beta = cone.angle(x, y);
    if beta >= PI - 1e-12 {
        return vec![w];
    }
    if beta <= 1e-12 {
        return if y.r >= x.r { vec![w] } else { antipodes(&v) };
    }
    let dx = y.r * beta.cos() - x.r;
    let dy = y.r * beta.sin();
    let alpha = dy.atan2(dx);
    let beyond = alpha - beta;
    if beyond <= 1e-12 {
        return vec![w];
    }
    let candidates = b.points_at_distance(&w, beyond);
    let exact: Vec<BPoint> = candidates
        .iter()
        .copied()
        .filter(|xi| (b.tits_distance(&v, xi) - alpha).abs() <= 1e-9)
        .collect();
    if !exact.is_empty() {
        return exact;
    }
    candidates
        .into_iter()
        .min_by(|p, q| {
            let e = |xi: &BPoint| (b.tits_distance(&v, xi) - alpha).abs();
            e(p).total_cmp(&e(q))
        })
        .into_iter()
        .collect()
}

impl<S: Scalar> Ambient for Tree<S> {
    type S = S;
    type Point = TreePoint<S>;
    type Ideal = End;

    fn base_point(&self) -> TreePoint<S> {
        self.root()
    }

    fn distance(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> S {
        Tree::distance(self, x, y)
    }

    fn geodesic_point(&self, x: &TreePoint<S>, y: &TreePoint<S>, t: S) -> TreePoint<S> {
        let t = t.max_of(S::zero()).min_of(Tree::distance(self, x, y));
        Tree::geodesic_point(self, x, y, t).expect("parameter clamped to the segment")
    }

    fn phi(&self, xi: &End, t: S, x: &TreePoint<S>) -> TreePoint<S> {
        Tree::phi(self, xi, t, x)
    }

    fn busemann(&self, xi: &End, x: &TreePoint<S>) -> S {
        Tree::busemann(self, xi, x)
    }

    fn tits_angle(&self, a: &End, b: &End) -> f64 {
        if a == b {
            0.0
        } else {
            PI
        }
    }

    fn ideal_type(&self, _xi: &End) -> f64 {
        0.0
    }

    fn extensions(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> Vec<End> {
        Tree::extensions(self, x, y)
    }

    fn canonical_ideal(&self) -> End {
        if self.is_spider() {
            End { anchor: vec![0] }
        } else {
            End { anchor: vec![] }
        }
    }

    fn delta_length(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> DeltaVector {
        Tree::delta_length(self, x, y)
    }

    fn refined_length(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> RefinedLength {
        Tree::refined_length(self, x, y)
    }

    /// The Tits boundary of a tree is discrete: distinct ends are at angle `pi`.
    /// The configuration is evaluated on its distinct ends plus one further end.
    fn stability(&self, entries: &[(End, f64)], tol: f64) -> BoundaryStability<End> {
        let mut ends: Vec<End> = Vec::new();
        let mut indexed = Vec::with_capacity(entries.len());
        for (xi, m) in entries {
            let i = match ends.iter().position(|e| e == xi) {
                Some(i) => i,
                None => {
                    ends.push(xi.clone());
                    ends.len() - 1
                }
            };
            indexed.push((BPoint::Vertex(i), *m));
        }
        let other = self.unused_end(&ends);
        let k = (ends.len() + 1).max(3);
        let building = Arc::new(BuildingGraph::points_unchecked(k));
        let rep = WeightedConfiguration::new(building, indexed).min_slope_with_tol(tol);
        let BPoint::Vertex(i) = rep.argmin else { unreachable!("0-dimensional argmin") };
        BoundaryStability {
            min_slope: rep.min_slope,
            argmin: ends.get(i).cloned().unwrap_or(other),
            classification: rep.classification,
        }
    }

    fn sample_ideals(&self, rng: &mut dyn RngCore, polygon: &[TreePoint<S>], count: usize) -> Vec<End> {
        let mut out: Vec<End> = Vec::new();
        let push = |e: End, out: &mut Vec<End>| {
            if !out.contains(&e) {
                out.push(e);
            }
        };
        for x in polygon.iter().chain(std::iter::once(&self.root())) {
            if self.is_spider() {
                if let Some(&leg) = x.path.first() {
                    push(End { anchor: vec![leg] }, &mut out);
                }
                continue;
            }
            for b in self.branches(&x.path) {
                if let crate::trees::Branch::Child(j) = b {
                    let mut a = x.path.clone();
                    a.push(j);
                    push(self.end(a).expect("valid child path"), &mut out);
                }
            }
            if !x.path.is_empty() {
                push(self.end(x.path[..x.path.len() - 1].to_vec()).expect("valid prefix"), &mut out);
            }
        }
        if let crate::trees::TreeKind::Spider { legs } = self.kind() {
            for l in 0..legs {
                push(End { anchor: vec![l] }, &mut out);
            }
        }
        for _ in 0..count {
            let e = self.random_end(rng, 4);
            push(e, &mut out);
        }
        out
    }
}

impl<S: Scalar> Tree<S> {
    /// Some end not in `ends`.
    fn unused_end(&self, ends: &[End]) -> End {
        let mut k = 0u32;
        loop {
            let cand = if self.is_spider() {
                End { anchor: vec![k] }
            } else {
                let mut a = vec![1];
                a.extend(std::iter::repeat(1).take(k as usize));
                End { anchor: a }
            };
            if !ends.contains(&cand) {
                return cand;
            }
            k += 1;
        }
    }
}

/// Cyclic vertex list `x_1, ..., x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<P> {
    pub vertices: Vec<P>,
}

impl<P: Clone> Polygon<P> {
    pub fn new(vertices: Vec<P>) -> Self {
        assert!(!vertices.is_empty(), "a polygon has at least one vertex");
        Polygon { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Endpoints `(x_{i-1}, x_i)` of side `i` (0-based: side `k` ends at `vertices[k]`).
    pub fn side(&self, k: usize) -> (&P, &P) {
        let n = self.vertices.len();
        (&self.vertices[(k + n - 1) % n], &self.vertices[k])
    }
}

/// Delta-side lengths and refined side lengths.
pub fn side_lengths<A: Ambient>(ambient: &A, p: &Polygon<A::Point>) -> (Vec<DeltaVector>, Vec<RefinedLength>) {
    (0..p.len())
        .map(|k| {
            let (x, y) = p.side(k);
            (ambient.delta_length(x, y), ambient.refined_length(x, y))
        })
        .unzip()
}

/// Random closed polygon with `n` vertices in a cone over a building.
pub fn random_cone_polygon<R: Rng + ?Sized>(cone: &Cone, rng: &mut R, n: usize, max_r: f64) -> Polygon<ConePoint> {
    let b = cone.building();
    Polygon::new(
        (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    ConePoint::TIP
                } else {
                    ConePoint::new(b.random_point(rng), rng.gen_range(0.05..max_r))
                }
            })
            .collect(),
    )
}
