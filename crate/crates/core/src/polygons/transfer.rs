//! Transfer of polygons between trees modelled on the same Coxeter complex.
//!
//! The last vertex `zeta = x_n` is sent to the point at the same depth on the
//! ray through child `0`. Each side is then walked in pieces between vertices;
//! at every vertex the image walk moves toward the image of `zeta` exactly
//! when the original walk moves toward `zeta`, and otherwise takes the lowest
//! branch that keeps the side geodesic. This preserves distances to `zeta` and
//! the type of every point, hence the refined side lengths.

use thiserror::Error;

use super::Polygon;
use crate::coxeter::RefinedLength;
use crate::scalar::Scalar;
use crate::trees::{epoint, Branch, End, Tree, TreeKind, TreePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("the trees are not modelled on the same Coxeter complex")]
    DifferentComplex,
    #[error("a regular tree's Coxeter complex does not embed in that of a spider")]
    NotEmbeddable,
    #[error("no branch available at {0:?}")]
    NoBranch(Vec<u32>),
}

/// Transfer between trees with the same Coxeter complex (regular to regular, spider to spider).
pub fn transfer_polygon<S: Scalar>(
    from: &Tree<S>,
    p: &Polygon<TreePoint<S>>,
    to: &Tree<S>,
) -> Result<Polygon<TreePoint<S>>, TransferError> {
    if from.is_spider() != to.is_spider() {
        return Err(TransferError::DifferentComplex);
    }
    walk(from, p, to)
}

/// Transfer along an embedding of Coxeter complexes: a spider `(R, {+1,-1})`
/// into a regular tree `(R, reflections at the integers)`, or between trees of the same complex.
pub fn embed_transfer<S: Scalar>(
    from: &Tree<S>,
    p: &Polygon<TreePoint<S>>,
    to: &Tree<S>,
) -> Result<Polygon<TreePoint<S>>, TransferError> {
    if !from.is_spider() && to.is_spider() {
        return Err(TransferError::NotEmbeddable);
    }
    walk(from, p, to)
}

/// Refined side lengths of a polygon in `from`, mapped into the complex of `to`.
pub fn image_refined_lengths<S: Scalar>(
    from: &Tree<S>,
    p: &Polygon<TreePoint<S>>,
    to: &Tree<S>,
) -> Vec<RefinedLength> {
    let cx = to.complex();
    (0..p.len())
        .map(|k| {
            let (x, y) = p.side(k);
            let (a, b) = from.chart(x, y);
            cx.refined_length(&epoint(a), &epoint(b)).expect("rank-one coordinates")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    Branch(Branch),
    /// From an interior point: toward the root (`false`) or away from it (`true`).
    Vertical(bool),
}

fn walk<S: Scalar>(
    from: &Tree<S>,
    p: &Polygon<TreePoint<S>>,
    to: &Tree<S>,
) -> Result<Polygon<TreePoint<S>>, TransferError> {
    let n = p.len();
    let zeta = p.vertices[n - 1].clone();
    let axis = match to.kind() {
        TreeKind::Spider { .. } => End { anchor: vec![0] },
        TreeKind::Regular { .. } => End { anchor: vec![] },
    };
    let zeta2 = to.ray_point(&axis, zeta.depth);
    let mut cur = zeta2.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (x, y) = p.side(k);
        cur = walk_side(from, x, y, &zeta, to, cur, &zeta2)?;
        out.push(cur.clone());
    }
    Ok(Polygon::new(out))
}

/// Distances along the segment `x -> y` at which it meets a vertex of `tree`.
fn vertex_times<S: Scalar>(tree: &Tree<S>, x: &TreePoint<S>, y: &TreePoint<S>) -> Vec<S> {
    let c = tree.confluence(x, y);
    let up = x.depth - c;
    let mut out = Vec::new();
    let depths_between = |lo: S, hi: S, out: &mut Vec<S>, map: &dyn Fn(S) -> S| {
        if tree.is_spider() {
            if lo == S::zero() {
                out.push(map(S::zero()));
            }
            return;
        }
        let mut e = lo.ceil();
        while e <= hi {
            out.push(map(e));
            e = e + S::one();
        }
    };
    depths_between(c, x.depth, &mut out, &|e| x.depth - e);
    depths_between(c, y.depth, &mut out, &|e| up + (e - c));
    out
}

fn walk_side<S: Scalar>(
    from: &Tree<S>,
    x: &TreePoint<S>,
    y: &TreePoint<S>,
    zeta: &TreePoint<S>,
    to: &Tree<S>,
    start: TreePoint<S>,
    zeta2: &TreePoint<S>,
) -> Result<TreePoint<S>, TransferError> {
    let len = from.distance(x, y);
    let mut breaks = vertex_times(from, x, y);
    let dz = from.distance(x, zeta);
    if dz + from.distance(zeta, y) == len {
        breaks.push(dz);
    }
    breaks.push(len);
    breaks.retain(|t| *t > S::zero() && *t <= len);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("ordered scalars"));
    breaks.dedup();

    let mut cur = start;
    let mut incoming: Option<Branch> = None;
    let mut t = S::zero();
    for next in breaks {
        let a = from.geodesic_point(x, y, t).expect("inside the side");
        let b = from.geodesic_point(x, y, next).expect("inside the side");
        let toward = from.distance(&b, zeta) < from.distance(&a, zeta);
        let down = b.depth > a.depth;
        while t < next {
            let step = choose_step(to, &cur, zeta2, toward, down, incoming)?;
            let room = room_along(to, &cur, step);
            let piece = match room {
                Some(r) => r.min_of(next - t),
                None => next - t,
            };
            let moved = take_step(to, &cur, step, piece);
            incoming = arrival_branch(to, &cur, &moved);
            cur = moved;
            t = t + piece;
        }
    }
    Ok(cur)
}

/// Branch of the vertex `v` on the way to `target`, if `target != v`.
fn branch_toward<S: Scalar>(v: &TreePoint<S>, target: &TreePoint<S>) -> Option<Branch> {
    if v == target {
        return None;
    }
    let k = v.path.len();
    if target.path.len() > k && target.path[..k] == v.path[..] && target.depth > v.depth {
        Some(Branch::Child(target.path[k]))
    } else {
        Some(Branch::Up)
    }
}

fn choose_step<S: Scalar>(
    to: &Tree<S>,
    cur: &TreePoint<S>,
    zeta2: &TreePoint<S>,
    toward: bool,
    down: bool,
    incoming: Option<Branch>,
) -> Result<Step, TransferError> {
    if to.is_vertex(cur) {
        let toward_branch = branch_toward(cur, zeta2);
        if toward {
            return Ok(Step::Branch(toward_branch.expect("zeta lies ahead")));
        }
        return to
            .branches(&cur.path)
            .into_iter()
            .find(|b| Some(*b) != toward_branch && Some(*b) != incoming)
            .map(Step::Branch)
            .ok_or_else(|| TransferError::NoBranch(cur.path.clone()));
    }
    if cur == zeta2 {
        return Ok(Step::Vertical(down));
    }
    let k = cur.path.len();
    let zeta_below = zeta2.path.len() >= k && zeta2.path[..k] == cur.path[..] && zeta2.depth > cur.depth;
    Ok(Step::Vertical(if toward { zeta_below } else { !zeta_below }))
}

/// Distance to the next vertex in the direction of `step`, if any.
fn room_along<S: Scalar>(to: &Tree<S>, cur: &TreePoint<S>, step: Step) -> Option<S> {
    let spider = to.is_spider();
    match step {
        Step::Branch(Branch::Up) => Some(S::one()),
        Step::Branch(Branch::Child(_)) => (!spider).then(S::one),
        Step::Vertical(false) => Some(if spider {
            cur.depth
        } else {
            cur.depth - S::from_i64(cur.path.len() as i64 - 1)
        }),
        Step::Vertical(true) => (!spider).then(|| S::from_i64(cur.path.len() as i64) - cur.depth),
    }
}

fn take_step<S: Scalar>(to: &Tree<S>, cur: &TreePoint<S>, step: Step, len: S) -> TreePoint<S> {
    match step {
        Step::Branch(Branch::Up) | Step::Vertical(false) => to.ancestor_point(cur, cur.depth - len),
        Step::Branch(Branch::Child(j)) => {
            let mut path = cur.path.clone();
            path.push(j);
            TreePoint { path, depth: cur.depth + len }
        }
        Step::Vertical(true) => TreePoint { path: cur.path.clone(), depth: cur.depth + len },
    }
}

/// Branch at the new point leading back to the old one, when the new point is a vertex.
fn arrival_branch<S: Scalar>(to: &Tree<S>, old: &TreePoint<S>, new: &TreePoint<S>) -> Option<Branch> {
    if !to.is_vertex(new) {
        return None;
    }
    if new.depth < old.depth {
        Some(Branch::Child(old.path[new.path.len()]))
    } else {
        Some(Branch::Up)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygons::side_lengths;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn triangle_three_to_four() {
        let a: Tree<Rational> = Tree::regular(3).unwrap();
        let b: Tree<Rational> = Tree::regular(4).unwrap();
        let p = Polygon::new(vec![
            a.point(vec![1, 0], r(3, 2)).unwrap(),
            a.point(vec![2], r(1, 3)).unwrap(),
            a.point(vec![1, 1, 1], r(11, 4)).unwrap(),
        ]);
        let q = transfer_polygon(&a, &p, &b).unwrap();
        assert_eq!(side_lengths(&a, &p).1, side_lengths(&b, &q).1);
    }

    #[test]
    fn spider_triangle_into_tree() {
        let s: Tree<Rational> = Tree::spider(3).unwrap();
        let t: Tree<Rational> = Tree::regular(3).unwrap();
        let p = Polygon::new((0..3).map(|l| s.point(vec![l], r(1, 2)).unwrap()).collect());
        let q = embed_transfer(&s, &p, &t).unwrap();
        assert_eq!(image_refined_lengths(&s, &p, &t), side_lengths(&t, &q).1);
        assert!(side_lengths(&t, &q).0.iter().all(|h| h.length == 1.0));
        assert_eq!(embed_transfer(&t, &q, &s), Err(TransferError::NotEmbeddable));
    }

    #[test]
    fn one_gon() {
        let a: Tree<Rational> = Tree::regular(3).unwrap();
        let b: Tree<Rational> = Tree::regular(5).unwrap();
        let p = Polygon::new(vec![a.point(vec![2, 1], r(7, 5)).unwrap()]);
        let q = transfer_polygon(&a, &p, &b).unwrap();
        assert_eq!(side_lengths(&a, &p).1, side_lengths(&b, &q).1);
    }
}
