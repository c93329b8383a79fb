//! Named standard buildings.

use super::{BuildingError, BuildingGraph};

pub(super) fn named(kind: &str) -> Result<BuildingGraph, BuildingError> {
    let unknown = || BuildingError::UnknownKind(kind.to_string());
    if let Some(k) = kind.strip_prefix("points:") {
        let k: usize = k.trim().parse().map_err(|_| unknown())?;
        return BuildingGraph::points(k);
    }
    if let Some(st) = kind.strip_prefix("complete_bipartite:") {
        let (s, t) = st.split_once(',').ok_or_else(unknown)?;
        let s: usize = s.trim().parse().map_err(|_| unknown())?;
        let t: usize = t.trim().parse().map_err(|_| unknown())?;
        let pairs: Vec<(usize, usize)> =
            (0..s).flat_map(|a| (0..t).map(move |b| (a, s + b))).collect();
        return incidence(2, s, t, &pairs);
    }
    match kind {
        "fano" => projective_plane(2),
        "pg23" => projective_plane(3),
        "gq22" => symplectic_quadrangle(),
        _ => Err(unknown()),
    }
}

fn incidence(m: u32, points: usize, lines: usize, pairs: &[(usize, usize)]) -> Result<BuildingGraph, BuildingError> {
    let n = points + lines;
    let ids = (0..n).map(|i| i.to_string()).collect();
    let types = (0..n).map(|i| u8::from(i >= points)).collect();
    BuildingGraph::from_graph(m, ids, types, pairs)
}

/// Normalized nonzero vectors of `F_p^d` (first nonzero coordinate 1), in lexicographic order.
fn projective_points(p: u32, d: usize) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(d as u32);
    let mut out = Vec::new();
    for code in 1..total {
        let mut v = vec![0u32; d];
        let mut c = code;
        for x in v.iter_mut().rev() {
            *x = (c % p as usize) as u32;
            c /= p as usize;
        }
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

fn dot(a: &[u32], b: &[u32], p: u32) -> u32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<u32>() % p
}

/// Incidence graph of the Desarguesian plane `PG(2, p)`.
fn projective_plane(p: u32) -> Result<BuildingGraph, BuildingError> {
    let pts = projective_points(p, 3);
    let n = pts.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| dot(&pts[i], &pts[j], p) == 0)
        .map(|(i, j)| (i, n + j))
        .collect();
    incidence(3, n, n, &pairs)
}

/// Generalized quadrangle `W(2)`: points of `PG(3, 2)` and lines totally
/// isotropic for the symplectic form `x1 y2 + x2 y1 + x3 y4 + x4 y3`.
fn symplectic_quadrangle() -> Result<BuildingGraph, BuildingError> {
    let pts = projective_points(2, 4);
    let form = |a: &[u32], b: &[u32]| (a[0] * b[1] + a[1] * b[0] + a[2] * b[3] + a[3] * b[2]) % 2;
    let index = |v: &[u32]| pts.iter().position(|q| q == v).expect("nonzero vector");
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if form(&pts[i], &pts[j]) == 0 {
                let sum: Vec<u32> = pts[i].iter().zip(&pts[j]).map(|(x, y)| (x + y) % 2).collect();
                let mut line = vec![i, j, index(&sum)];
                line.sort();
                if !lines.contains(&line) {
                    lines.push(line);
                }
            }
        }
    }
    let n = pts.len();
    let pairs: Vec<(usize, usize)> = lines
        .iter()
        .enumerate()
        .flat_map(|(l, line)| line.iter().map(move |&q| (q, n + l)))
        .collect();
    incidence(4, n, lines.len(), &pairs)
}
