//! Thick metric trees: lazily materialized regular simplicial trees and spiders.
//!
//! Points are addressed by a root path of child indices and a depth. A point
//! with path `P` lies on the edge from the parent of `P` to `P`, so
//! `|P| - 1 < depth <= |P|`. In a spider the root is the only vertex and a
//! path is a single leg index.

use std::collections::BTreeSet;
use std::marker::PhantomData;
use std::sync::{Arc, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{DeltaVector, EPoint, EuclideanCoxeterComplex, RefinedLength, SphericalCoxeterComplex};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("a thick tree needs at least 3 branches at each vertex, got {0}")]
    NotThick(u32),
    #[error("invalid path {0:?}")]
    BadPath(Vec<u32>),
    #[error("depth {depth} does not lie on the edge ending at {path:?}")]
    BadDepth { path: Vec<u32>, depth: f64 },
    #[error("parameter {t} outside the geodesic of length {len}")]
    OutOfRange { t: f64, len: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    /// Simplicial tree, every vertex of valence `valence`, unit edges.
    Regular { valence: u32 },
    /// Cone over a 0-dimensional building: `legs` rays glued at the root.
    Spider { legs: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreePoint<S> {
    pub path: Vec<u32>,
    pub depth: S,
}

/// An end, given by the ray from the root through `anchor` that continues
/// along child `0` forever (for spiders, the leg `anchor[0]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct End {
    pub anchor: Vec<u32>,
}

/// A branch at a vertex: one of its children, or the edge toward the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Child(u32),
    Up,
}

#[derive(Debug)]
pub struct Tree<S> {
    kind: TreeKind,
    materialized: Arc<RwLock<BTreeSet<Vec<u32>>>>,
    _scalar: PhantomData<S>,
}

impl<S> Clone for Tree<S> {
    fn clone(&self) -> Self {
        Tree { kind: self.kind, materialized: self.materialized.clone(), _scalar: PhantomData }
    }
}

impl<S> PartialEq for Tree<S> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl<S: Scalar> Tree<S> {
    pub fn regular(valence: u32) -> Result<Self, TreeError> {
        Self::new(TreeKind::Regular { valence })
    }

    pub fn spider(legs: u32) -> Result<Self, TreeError> {
        Self::new(TreeKind::Spider { legs })
    }

    pub fn new(kind: TreeKind) -> Result<Self, TreeError> {
        let (TreeKind::Regular { valence: k } | TreeKind::Spider { legs: k }) = kind;
        if k < 3 {
            return Err(TreeError::NotThick(k));
        }
        let tree = Tree { kind, materialized: Arc::default(), _scalar: PhantomData };
        tree.materialize(&[]);
        Ok(tree)
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn is_spider(&self) -> bool {
        matches!(self.kind, TreeKind::Spider { .. })
    }

    /// The model Coxeter complex: `R` with reflections at the integers, or `R` with `{+1, -1}`.
    pub fn complex(&self) -> EuclideanCoxeterComplex {
        match self.kind {
            TreeKind::Regular { .. } => EuclideanCoxeterComplex::simplicial_line(),
            TreeKind::Spider { .. } => EuclideanCoxeterComplex::one_vertex(SphericalCoxeterComplex::rank_one()),
        }
    }

    fn materialize(&self, path: &[u32]) {
        let known = self.materialized.read().map(|m| m.contains(path)).unwrap_or(true);
        if !known {
            if let Ok(mut m) = self.materialized.write() {
                m.insert(path.to_vec());
            }
        }
    }

    /// Number of vertices materialized by queries so far.
    pub fn materialized_count(&self) -> usize {
        self.materialized.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn materialized_vertices(&self) -> Vec<Vec<u32>> {
        self.materialized.read().map(|m| m.iter().cloned().collect()).unwrap_or_default()
    }

    /// Number of children of the vertex at `path`.
    pub fn child_count(&self, path: &[u32]) -> u32 {
        match self.kind {
            TreeKind::Regular { valence } => {
                if path.is_empty() {
                    valence
                } else {
                    valence - 1
                }
            }
            TreeKind::Spider { legs } => {
                if path.is_empty() {
                    legs
                } else {
                    0
                }
            }
        }
    }

    /// Branches at a vertex, children first and then the edge toward the root.
    pub fn branches(&self, path: &[u32]) -> Vec<Branch> {
        self.materialize(path);
        let mut out: Vec<Branch> = (0..self.child_count(path)).map(Branch::Child).collect();
        if !path.is_empty() {
            out.push(Branch::Up);
        }
        out
    }

    fn valid_path(&self, path: &[u32]) -> bool {
        match self.kind {
            TreeKind::Regular { valence } => path
                .iter()
                .enumerate()
                .all(|(i, &c)| c < if i == 0 { valence } else { valence - 1 }),
            TreeKind::Spider { legs } => path.len() <= 1 && path.iter().all(|&c| c < legs),
        }
    }

    pub fn root(&self) -> TreePoint<S> {
        TreePoint { path: vec![], depth: S::zero() }
    }

    /// Validated point.
    pub fn point(&self, path: Vec<u32>, depth: S) -> Result<TreePoint<S>, TreeError> {
        if !self.valid_path(&path) {
            return Err(TreeError::BadPath(path));
        }
        let len = S::from_i64(path.len() as i64);
        let ok = if path.is_empty() {
            depth == S::zero()
        } else if self.is_spider() {
            depth > S::zero()
        } else {
            depth > len - S::one() && depth <= len
        };
        if !ok {
            return Err(TreeError::BadDepth { path, depth: depth.to_f64() });
        }
        Ok(TreePoint { path, depth })
    }

    /// Vertex at the end of `path` (regular trees).
    pub fn vertex(&self, path: Vec<u32>) -> TreePoint<S> {
        let depth = S::from_i64(path.len() as i64);
        TreePoint { path, depth }
    }

    pub fn is_vertex(&self, x: &TreePoint<S>) -> bool {
        match self.kind {
            TreeKind::Regular { .. } => x.depth == S::from_i64(x.path.len() as i64),
            TreeKind::Spider { .. } => x.path.is_empty(),
        }
    }

    /// Point at depth `e` on the segment from the root to `x`.
    pub fn ancestor_point(&self, x: &TreePoint<S>, e: S) -> TreePoint<S> {
        if e <= S::zero() {
            return self.root();
        }
        if e >= x.depth {
            return x.clone();
        }
        let len = (e.ceil().to_f64() as usize).min(x.path.len());
        let len = if self.is_spider() { len.min(1) } else { len };
        TreePoint { path: x.path[..len].to_vec(), depth: e }
    }

    /// Depth of the confluence point of the segments from the root to `x` and `y`.
    pub fn confluence(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> S {
        let k = common_prefix(&x.path, &y.path);
        if k == x.path.len().min(y.path.len()) {
            x.depth.min_of(y.depth)
        } else {
            S::from_i64(k as i64)
        }
    }

    pub fn distance(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> S {
        let c = self.confluence(x, y);
        x.depth + y.depth - c - c
    }

    /// Point at distance `t` from `x` on the geodesic to `y`.
    pub fn geodesic_point(&self, x: &TreePoint<S>, y: &TreePoint<S>, t: S) -> Result<TreePoint<S>, TreeError> {
        let len = self.distance(x, y);
        if t < S::zero() || t > len {
            return Err(TreeError::OutOfRange { t: t.to_f64(), len: len.to_f64() });
        }
        let c = self.confluence(x, y);
        let up = x.depth - c;
        Ok(if t <= up {
            self.ancestor_point(x, x.depth - t)
        } else {
            self.ancestor_point(y, c + (t - up))
        })
    }

    pub fn midpoint(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> TreePoint<S> {
        let d = self.distance(x, y);
        self.geodesic_point(x, y, d.half()).expect("midpoint lies on the geodesic")
    }

    /// Canonical form of an end.
    pub fn end(&self, anchor: Vec<u32>) -> Result<End, TreeError> {
        if !self.valid_path(&anchor) || (self.is_spider() && anchor.len() != 1) {
            return Err(TreeError::BadPath(anchor));
        }
        Ok(self.canonical_end(anchor))
    }

    fn canonical_end(&self, mut anchor: Vec<u32>) -> End {
        if !self.is_spider() {
            while anchor.last() == Some(&0) {
                anchor.pop();
            }
        }
        End { anchor }
    }

    /// First `len` child indices of the ray to `xi`.
    pub fn ray_prefix(&self, xi: &End, len: usize) -> Vec<u32> {
        if self.is_spider() {
            return xi.anchor[..len.min(1)].to_vec();
        }
        let mut p: Vec<u32> = xi.anchor.iter().copied().take(len).collect();
        p.resize(len, 0);
        p
    }

    /// Point at depth `e` on the ray from the root to `xi`.
    pub fn ray_point(&self, xi: &End, e: S) -> TreePoint<S> {
        if e <= S::zero() {
            return self.root();
        }
        let len = e.ceil().to_f64() as usize;
        TreePoint { path: self.ray_prefix(xi, len), depth: e }
    }

    /// Depth where the segment from the root to `x` leaves the ray to `xi`.
    pub fn confluence_end(&self, xi: &End, x: &TreePoint<S>) -> S {
        let ray = self.ray_prefix(xi, x.path.len());
        let k = common_prefix(&x.path, &ray);
        if k == x.path.len() {
            x.depth
        } else {
            x.depth.min_of(S::from_i64(k as i64))
        }
    }

    /// Busemann function of `xi`, normalized to vanish at the root.
    pub fn busemann(&self, xi: &End, x: &TreePoint<S>) -> S {
        let c = self.confluence_end(xi, x);
        x.depth - c - c
    }

    /// Point at distance `t` from `x` on the ray from `x` to `xi`.
    pub fn phi(&self, xi: &End, t: S, x: &TreePoint<S>) -> TreePoint<S> {
        let c = self.confluence_end(xi, x);
        let up = x.depth - c;
        if t <= up {
            self.ancestor_point(x, x.depth - t)
        } else {
            self.ray_point(xi, c + (t - up))
        }
    }

    /// Ends `xi` such that the ray from `x` to `xi` passes through `y`, canonical first.
    pub fn extensions(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> Vec<End> {
        let c = self.confluence(x, y);
        if y.depth > c {
            if self.is_spider() {
                return vec![End { anchor: y.path.clone() }];
            }
            let node = y.path.clone();
            return self
                .branches(&node)
                .into_iter()
                .filter_map(|b| match b {
                    Branch::Child(j) => {
                        let mut a = node.clone();
                        a.push(j);
                        Some(self.canonical_end(a))
                    }
                    Branch::Up => None,
                })
                .collect();
        }
        if self.is_spider() {
            let TreeKind::Spider { legs } = self.kind else { unreachable!() };
            let from = x.path.first().copied();
            return (0..legs)
                .filter(|&l| Some(l) != from)
                .map(|l| End { anchor: vec![l] })
                .collect();
        }
        let k = if self.is_vertex(y) { y.path.len() } else { y.path.len() - 1 };
        let node = x.path[..k].to_vec();
        let came_from = x.path[k];
        self.branches(&node)
            .into_iter()
            .filter_map(|b| match b {
                Branch::Child(j) if j != came_from => {
                    let mut a = node.clone();
                    a.push(j);
                    Some(self.canonical_end(a))
                }
                Branch::Child(_) => None,
                Branch::Up => {
                    let mut a = node[..k - 1].to_vec();
                    let other = if node[k - 1] == 0 { 1 } else { 0 };
                    a.push(other);
                    Some(self.canonical_end(a))
                }
            })
            .collect()
    }

    /// Coordinates of `x` and `y` on a model line through both, vertices at integers.
    pub fn chart(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> (S, S) {
        let c = self.confluence(x, y);
        if self.is_spider() {
            if c == S::zero() && !x.path.is_empty() && !y.path.is_empty() {
                return (-x.depth, y.depth);
            }
            return (x.depth, y.depth);
        }
        if c.is_integer() || c == x.depth {
            (c + c - x.depth, y.depth)
        } else {
            (-x.depth, y.depth - c - c)
        }
    }

    pub fn delta_length(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> DeltaVector {
        DeltaVector::new(self.distance(x, y).to_f64(), 0.0)
    }

    pub fn refined_length(&self, x: &TreePoint<S>, y: &TreePoint<S>) -> RefinedLength {
        let (p, q) = self.chart(x, y);
        self.complex()
            .refined_length(&epoint(p), &epoint(q))
            .expect("rank-one coordinates")
    }

    /// Random point of depth at most `max_depth` whose depth has denominator dividing `den`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, max_depth: u32, den: i64) -> TreePoint<S> {
        let depth_units = rng.gen_range(0..=(max_depth as i64 * den));
        if depth_units == 0 {
            return self.root();
        }
        let depth = S::from_i64(depth_units) / S::from_i64(den);
        let len = match self.kind {
            TreeKind::Spider { .. } => 1,
            TreeKind::Regular { .. } => ((depth_units + den - 1) / den) as usize,
        };
        let path = (0..len)
            .map(|i| rng.gen_range(0..self.child_count(if i == 0 { &[] } else { &[0] })))
            .collect();
        TreePoint { path, depth }
    }

    /// Random end whose anchor has length at most `max_len`.
    pub fn random_end<R: Rng + ?Sized>(&self, rng: &mut R, max_len: usize) -> End {
        let len = if self.is_spider() { 1 } else { rng.gen_range(0..=max_len) };
        let anchor = (0..len)
            .map(|i| rng.gen_range(0..self.child_count(if i == 0 { &[] } else { &[0] })))
            .collect();
        self.canonical_end(anchor)
    }
}

/// Exact model-space coordinate when the scalar is exact.
pub fn epoint<S: Scalar>(x: S) -> EPoint {
    match x.as_rational() {
        Some(r) => EPoint::Exact(r),
        None => EPoint::Real([x.to_f64(), 0.0]),
    }
}
