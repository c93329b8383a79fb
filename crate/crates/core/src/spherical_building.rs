//! Finite thick spherical buildings of dimension 0 and 1.
//!
//! A one-dimensional building is a generalized `m`-gon: a bipartite graph of
//! girth `2m` and diameter `m`, with every edge of length `pi/m`. A
//! zero-dimensional building is a finite set of points at mutual distance `pi`.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::SphericalCoxeterComplex;
use crate::scalar::SNAP;

mod standard;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildingError {
    #[error("unknown building kind {0:?}")]
    UnknownKind(String),
    #[error("malformed building spec: {0}")]
    Malformed(String),
    #[error("not a thick spherical building: {}", .0.join(", "))]
    Validation(Vec<String>),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAnEdge(String, String),
    #[error("offset {0} is not strictly inside the edge")]
    BadOffset(f64),
    #[error("parameter {s} outside the geodesic of length {len}")]
    OutOfRange { s: f64, len: f64 },
    #[error("no geodesic between distinct points of a 0-dimensional building")]
    NoGeodesic,
    #[error("type {0} lies outside the chamber")]
    BadType(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: serde_json::Value,
    #[serde(rename = "type")]
    pub ty: u8,
}

/// JSON description of a building: a named standard or an explicit graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BuildingSpec {
    Name(String),
    Named {
        kind: String,
    },
    Explicit {
        m: u32,
        vertices: Vec<VertexSpec>,
        edges: Vec<[serde_json::Value; 2]>,
    },
}

impl BuildingSpec {
    pub fn named(kind: &str) -> Self {
        BuildingSpec::Named { kind: kind.to_string() }
    }
}

/// Point of a building: a vertex, or an interior point of an edge.
///
/// `offset` is measured from the type-0 endpoint in units of the edge length
/// `pi/m`, and lies strictly between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BPoint {
    Vertex(usize),
    Edge { edge: usize, offset: f64 },
}

impl BPoint {
    /// Stable total order: vertices first by index, then edge points.
    pub fn canonical_cmp(&self, other: &BPoint) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (BPoint::Vertex(a), BPoint::Vertex(b)) => a.cmp(b),
            (BPoint::Vertex(_), BPoint::Edge { .. }) => Ordering::Less,
            (BPoint::Edge { .. }, BPoint::Vertex(_)) => Ordering::Greater,
            (BPoint::Edge { edge: e, offset: s }, BPoint::Edge { edge: f, offset: t }) => {
                e.cmp(f).then(s.partial_cmp(t).unwrap_or(Ordering::Equal))
            }
        }
    }

    /// Equality up to [`SNAP`] on edge offsets.
    pub fn same_as(&self, other: &BPoint) -> bool {
        match (self, other) {
            (BPoint::Edge { edge: e, offset: s }, BPoint::Edge { edge: f, offset: t }) => {
                e == f && (s - t).abs() <= SNAP
            }
            _ => self == other,
        }
    }
}

/// Wire form of a [`BPoint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BPointJson {
    Vertex {
        vertex: serde_json::Value,
    },
    EdgeRational {
        edge: [serde_json::Value; 2],
        offset_num: i64,
        offset_den: i64,
    },
    Edge {
        edge: [serde_json::Value; 2],
        offset: f64,
    },
}

/// A cycle of `2m` vertices, isometric to the model circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Apartment {
    pub vertices: Vec<usize>,
}

/// Validated finite thick spherical building.
#[derive(Debug, Clone)]
pub struct BuildingGraph {
    spec: BuildingSpec,
    dim: u32,
    m: u32,
    ids: Vec<String>,
    types: Vec<u8>,
    /// Edges as `(type-0 vertex, type-1 vertex)`.
    edges: Vec<(usize, usize)>,
    /// Neighbours sorted by vertex index, with the connecting edge.
    adj: Vec<Vec<(usize, usize)>>,
    edge_of: HashMap<(usize, usize), usize>,
    dist: Vec<Vec<u32>>,
}

impl PartialEq for BuildingGraph {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.m == other.m
            && self.ids == other.ids
            && self.types == other.types
            && self.edges == other.edges
    }
}

pub fn build_spherical(spec: &BuildingSpec) -> Result<BuildingGraph, BuildingError> {
    match spec {
        BuildingSpec::Name(kind) | BuildingSpec::Named { kind } => {
            let b = standard::named(kind)?;
            Ok(BuildingGraph { spec: spec.clone(), ..b })
        }
        BuildingSpec::Explicit { m, vertices, edges } => {
            let ids: Vec<String> = vertices.iter().map(|v| id_string(&v.id)).collect();
            let index: HashMap<&str, usize> =
                ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            if index.len() != ids.len() {
                return Err(BuildingError::Malformed("duplicate vertex ids".into()));
            }
            let types: Vec<u8> = vertices.iter().map(|v| v.ty).collect();
            if types.iter().any(|t| *t > 1) {
                return Err(BuildingError::Malformed("vertex types must be 0 or 1".into()));
            }
            let mut pairs = Vec::with_capacity(edges.len());
            for [u, v] in edges {
                let lookup = |x: &serde_json::Value| {
                    let s = id_string(x);
                    index.get(s.as_str()).copied().ok_or(BuildingError::UnknownVertex(s))
                };
                pairs.push((lookup(u)?, lookup(v)?));
            }
            let b = BuildingGraph::from_graph(*m, ids, types, &pairs)?;
            Ok(BuildingGraph { spec: spec.clone(), ..b })
        }
    }
}

fn id_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn id_value(s: &str) -> serde_json::Value {
    match s.parse::<u64>() {
        Ok(n) if n.to_string() == s => serde_json::Value::from(n),
        _ => serde_json::Value::String(s.to_string()),
    }
}

impl BuildingGraph {
    /// Zero-dimensional building with `k` points.
    pub fn points(k: usize) -> Result<Self, BuildingError> {
        if k < 3 {
            return Err(BuildingError::Validation(vec![format!(
                "thickness: {k} points, need at least 3"
            )]));
        }
        Ok(Self::points_unchecked(k))
    }

    /// Zero-dimensional building without the thickness check.
    pub fn points_unchecked(k: usize) -> Self {
        BuildingGraph {
            spec: BuildingSpec::named(&format!("points:{k}")),
            dim: 0,
            m: 1,
            ids: (0..k).map(|i| i.to_string()).collect(),
            types: vec![0; k],
            edges: vec![],
            adj: vec![vec![]; k],
            edge_of: HashMap::new(),
            dist: vec![],
        }
    }

    /// Builds and validates a one-dimensional building from an edge list.
    pub fn from_graph(
        m: u32,
        ids: Vec<String>,
        types: Vec<u8>,
        pairs: &[(usize, usize)],
    ) -> Result<Self, BuildingError> {
        let n = ids.len();
        let mut failures = Vec::new();
        if m < 2 {
            return Err(BuildingError::Malformed(format!("m must be at least 2, got {m}")));
        }
        let mut edges = Vec::with_capacity(pairs.len());
        let mut edge_of = HashMap::new();
        let mut bipartite = true;
        for &(u, v) in pairs {
            if u >= n || v >= n || u == v {
                return Err(BuildingError::Malformed(format!("bad edge ({u}, {v})")));
            }
            let (a, b) = match (types[u], types[v]) {
                (0, 1) => (u, v),
                (1, 0) => (v, u),
                _ => {
                    bipartite = false;
                    (u.min(v), u.max(v))
                }
            };
            if edge_of.insert((a, b), edges.len()).is_some() {
                return Err(BuildingError::Malformed(format!("repeated edge ({u}, {v})")));
            }
            edge_of.insert((b, a), edges.len());
            edges.push((a, b));
        }
        if !bipartite {
            failures.push("bipartite: an edge joins two vertices of the same type".to_string());
        }
        let mut adj = vec![Vec::new(); n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        for list in adj.iter_mut() {
            list.sort();
        }
        let dist = all_pairs_bfs(&adj);
        let girth = girth(&adj);
        if girth != Some(2 * m as usize) {
            failures.push(match girth {
                Some(g) => format!("girth: {g}, expected {}", 2 * m),
                None => format!("girth: acyclic, expected {}", 2 * m),
            });
        }
        let diameter = dist.iter().flatten().copied().max().unwrap_or(0);
        if diameter == u32::MAX {
            failures.push("diameter: graph is disconnected".to_string());
        } else if diameter != m {
            failures.push(format!("diameter: {diameter}, expected {m}"));
        }
        let min_degree = adj.iter().map(Vec::len).min().unwrap_or(0);
        if min_degree < 3 {
            failures.push(format!("thickness: min degree {min_degree}, need at least 3"));
        }
        if !failures.is_empty() {
            return Err(BuildingError::Validation(failures));
        }
        Ok(BuildingGraph {
            spec: BuildingSpec::Explicit {
                m,
                vertices: ids
                    .iter()
                    .zip(&types)
                    .map(|(id, &ty)| VertexSpec { id: id_value(id), ty })
                    .collect(),
                edges: edges.iter().map(|&(a, b)| [id_value(&ids[a]), id_value(&ids[b])]).collect(),
            },
            dim: 1,
            m,
            ids,
            types,
            edges,
            adj,
            edge_of,
            dist,
        })
    }

    pub fn spec(&self) -> &BuildingSpec {
        &self.spec
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Gonality `m` (1 for dimension 0).
    pub fn m(&self) -> u32 {
        self.m
    }

    /// The spherical Coxeter complex the building is modelled on.
    pub fn coxeter(&self) -> SphericalCoxeterComplex {
        if self.dim == 0 {
            SphericalCoxeterComplex::rank_one()
        } else {
            SphericalCoxeterComplex::dihedral(self.m).expect("validated m >= 2")
        }
    }

    /// Metric length `pi/m` of an edge.
    pub fn edge_length(&self) -> f64 {
        PI / self.m as f64
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_type(&self, v: usize) -> u8 {
        self.types[v]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_of.get(&(u, v)).copied()
    }

    /// Combinatorial distance between vertices of a one-dimensional building.
    pub fn vertex_distance(&self, u: usize, v: usize) -> u32 {
        if self.dim == 0 {
            u32::from(u != v)
        } else {
            self.dist[u][v]
        }
    }

    /// Edge point at `offset` from the type-0 end, snapped to a vertex when within [`SNAP`].
    pub fn edge_point(&self, edge: usize, offset: f64) -> BPoint {
        let (a, b) = self.edges[edge];
        if offset <= SNAP {
            BPoint::Vertex(a)
        } else if offset >= 1.0 - SNAP {
            BPoint::Vertex(b)
        } else {
            BPoint::Edge { edge, offset }
        }
    }

    /// All points, vertices and edge points, at which weights can be placed.
    pub fn vertices(&self) -> impl Iterator<Item = BPoint> {
        (0..self.ids.len()).map(BPoint::Vertex)
    }

    pub fn contains(&self, p: &BPoint) -> bool {
        match *p {
            BPoint::Vertex(v) => v < self.ids.len(),
            BPoint::Edge { edge, offset } => {
                edge < self.edges.len() && offset > 0.0 && offset < 1.0
            }
        }
    }

    fn vertex_to_point(&self, v: usize, p: &BPoint) -> f64 {
        match *p {
            BPoint::Vertex(u) => self.dist[v][u] as f64,
            BPoint::Edge { edge, offset } => {
                let (a, b) = self.edges[edge];
                (offset + self.dist[v][a] as f64).min(1.0 - offset + self.dist[v][b] as f64)
            }
        }
    }

    /// Tits distance measured in edge units (`pi/m`), capped at `m`.
    pub fn distance_units(&self, p: &BPoint, q: &BPoint) -> f64 {
        if self.dim == 0 {
            return if p == q { 0.0 } else { 1.0 };
        }
        let (p, q) = if p.canonical_cmp(q) == std::cmp::Ordering::Greater { (q, p) } else { (p, q) };
        let d = match (*p, *q) {
            (BPoint::Vertex(u), _) => self.vertex_to_point(u, q),
            (_, BPoint::Vertex(v)) => self.vertex_to_point(v, p),
            (BPoint::Edge { edge: e, offset: s }, BPoint::Edge { edge: f, offset: t }) => {
                if e == f {
                    (s - t).abs()
                } else {
                    let (a, b) = self.edges[e];
                    (s + self.vertex_to_point(a, q)).min(1.0 - s + self.vertex_to_point(b, q))
                }
            }
        };
        d.min(self.m as f64)
    }

    /// Tits distance in radians, in `[0, pi]`.
    pub fn tits_distance(&self, p: &BPoint, q: &BPoint) -> f64 {
        if self.dim == 0 {
            return if p == q { 0.0 } else { PI };
        }
        (self.distance_units(p, q) * self.edge_length()).min(PI)
    }

    /// Type of a point: `0` for type-0 vertices, `pi/m` for type-1 vertices,
    /// the offset angle for edge points, and `0` in dimension 0.
    pub fn accordion(&self, p: &BPoint) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        match *p {
            BPoint::Vertex(v) => self.types[v] as f64 * self.edge_length(),
            BPoint::Edge { offset, .. } => offset * self.edge_length(),
        }
    }

    /// All points of type `theta`.
    pub fn points_of_type(&self, theta: f64) -> Result<Vec<BPoint>, BuildingError> {
        if self.dim == 0 {
            return Ok(self.vertices().collect());
        }
        let w = self.edge_length();
        if !(-SNAP..=w + SNAP).contains(&theta) {
            return Err(BuildingError::BadType(theta));
        }
        let u = theta / w;
        if u <= SNAP || u >= 1.0 - SNAP {
            let ty = u8::from(u >= 1.0 - SNAP);
            return Ok((0..self.ids.len())
                .filter(|&v| self.types[v] == ty)
                .map(BPoint::Vertex)
                .collect());
        }
        Ok((0..self.edges.len()).map(|edge| BPoint::Edge { edge, offset: u }).collect())
    }

    /// All points at Tits distance `delta` (radians) from `center`, in canonical order.
    pub fn points_at_distance(&self, center: &BPoint, delta: f64) -> Vec<BPoint> {
        if self.dim == 0 {
            return self
                .vertices()
                .filter(|p| (self.tits_distance(center, p) - delta).abs() <= 1e-9)
                .collect();
        }
        let target = delta / self.edge_length();
        let mut out: Vec<BPoint> = Vec::new();
        let push = |p: BPoint, out: &mut Vec<BPoint>| {
            if (self.distance_units(center, &p) - target).abs() <= 1e-9
                && !out.iter().any(|q| q.same_as(&p))
            {
                out.push(p);
            }
        };
        for v in self.vertices() {
            push(v, &mut out);
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let mut cands = vec![
                target - self.distance_units(center, &BPoint::Vertex(a)),
                1.0 - (target - self.distance_units(center, &BPoint::Vertex(b))),
            ];
            if let BPoint::Edge { edge, offset } = *center {
                if edge == e {
                    cands.push(offset - target);
                    cands.push(offset + target);
                }
            }
            for t in cands {
                if t > SNAP && t < 1.0 - SNAP {
                    push(BPoint::Edge { edge: e, offset: t }, &mut out);
                }
            }
        }
        out.sort_by(|p, q| p.canonical_cmp(q));
        out
    }

    /// Common edge of two points on the same closed edge, with their offsets.
    fn common_edge(&self, p: &BPoint, q: &BPoint) -> Option<(usize, f64, f64)> {
        let on = |p: &BPoint, e: usize| -> Option<f64> {
            let (a, b) = self.edges[e];
            match *p {
                BPoint::Vertex(v) if v == a => Some(0.0),
                BPoint::Vertex(v) if v == b => Some(1.0),
                BPoint::Edge { edge, offset } if edge == e => Some(offset),
                _ => None,
            }
        };
        let candidates: Vec<usize> = match (*p, *q) {
            (BPoint::Edge { edge, .. }, _) | (_, BPoint::Edge { edge, .. }) => vec![edge],
            (BPoint::Vertex(u), BPoint::Vertex(v)) => self.edge_between(u, v).into_iter().collect(),
        };
        candidates
            .into_iter()
            .find_map(|e| Some((e, on(p, e)?, on(q, e)?)))
    }

    /// Waypoints of the canonical geodesic from `p` to `q`; consecutive
    /// waypoints lie on a common edge.
    fn route(&self, p: &BPoint, q: &BPoint) -> Vec<BPoint> {
        const TOL: f64 = 1e-9;
        let total = self.distance_units(p, q);
        if total <= SNAP {
            return vec![*p];
        }
        if let Some((_, s, t)) = self.common_edge(p, q) {
            if ((s - t).abs() - total).abs() <= TOL {
                return vec![*p, *q];
            }
        }
        let mut path = vec![*p];
        let mut v = match *p {
            BPoint::Vertex(v) => v,
            BPoint::Edge { edge, offset } => {
                let (a, b) = self.edges[edge];
                let mut exits = vec![(a, offset), (b, 1.0 - offset)];
                exits.sort_by_key(|&(x, _)| x);
                let (x, _) = exits
                    .into_iter()
                    .find(|&(x, c)| (c + self.vertex_to_point(x, q) - total).abs() <= TOL)
                    .expect("a geodesic leaves through an endpoint");
                path.push(BPoint::Vertex(x));
                x
            }
        };
        loop {
            if let BPoint::Vertex(t) = *q {
                if t == v {
                    break;
                }
            }
            let remaining = self.vertex_to_point(v, q);
            if let Some((_, s, t)) = self.common_edge(&BPoint::Vertex(v), q) {
                if ((s - t).abs() - remaining).abs() <= TOL {
                    path.push(*q);
                    break;
                }
            }
            let (w, _) = *self.adj[v]
                .iter()
                .find(|&&(w, _)| (1.0 + self.vertex_to_point(w, q) - remaining).abs() <= TOL)
                .expect("a geodesic continues through a neighbour");
            path.push(BPoint::Vertex(w));
            v = w;
        }
        path
    }

    /// Point at distance `s` (radians) from `p` on the canonical geodesic to `q`.
    ///
    /// Between antipodal points the geodesic with the lexicographically least
    /// vertex sequence is used.
    pub fn geodesic_point(&self, p: &BPoint, q: &BPoint, s: f64) -> Result<BPoint, BuildingError> {
        let len = self.tits_distance(p, q);
        if s < -1e-12 || s > len + 1e-12 {
            return Err(BuildingError::OutOfRange { s, len });
        }
        if self.dim == 0 {
            return if s <= 1e-12 {
                Ok(*p)
            } else if s >= len - 1e-12 {
                Ok(*q)
            } else {
                Err(BuildingError::NoGeodesic)
            };
        }
        let mut u = (s / self.edge_length()).clamp(0.0, self.distance_units(p, q));
        let path = self.route(p, q);
        for pair in path.windows(2) {
            let (e, a, b) = self.common_edge(&pair[0], &pair[1]).expect("waypoints share an edge");
            let seg = (a - b).abs();
            if u <= seg + SNAP {
                let offset = if b >= a { a + u.min(seg) } else { a - u.min(seg) };
                return Ok(self.edge_point(e, offset));
            }
            u -= seg;
        }
        Ok(*path.last().expect("route is non-empty"))
    }

    /// `+1` if the type increases as the canonical geodesic leaves `p` toward `q`, else `-1`.
    pub fn initial_direction(&self, p: &BPoint, q: &BPoint) -> f64 {
        if self.dim == 0 {
            return 1.0;
        }
        match *p {
            BPoint::Vertex(v) => {
                if self.types[v] == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            BPoint::Edge { edge, offset } => {
                let path = self.route(p, q);
                let next = path.get(1).copied().unwrap_or(*q);
                let (_, _, t) = self
                    .common_edge(p, &next)
                    .unwrap_or((edge, offset, offset));
                if t >= offset {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// All apartments (2m-cycles), each listed once starting at its least vertex.
    pub fn apartments(&self) -> Vec<Apartment> {
        if self.dim == 0 {
            let k = self.ids.len();
            return (0..k)
                .flat_map(|a| (a + 1..k).map(move |b| Apartment { vertices: vec![a, b] }))
                .collect();
        }
        let len = 2 * self.m as usize;
        let mut out = Vec::new();
        for start in 0..self.ids.len() {
            let mut path = vec![start];
            self.extend_cycles(start, len, &mut path, &mut out);
        }
        out
    }

    fn extend_cycles(&self, start: usize, len: usize, path: &mut Vec<usize>, out: &mut Vec<Apartment>) {
        let last = *path.last().expect("non-empty");
        if path.len() == len {
            if self.edge_between(last, start).is_some() && path[1] < last {
                out.push(Apartment { vertices: path.clone() });
            }
            return;
        }
        for &(w, _) in &self.adj[last] {
            if w > start && !path.contains(&w) {
                path.push(w);
                self.extend_cycles(start, len, path, out);
                path.pop();
            }
        }
    }

    /// Uniformly random vertex (probability 1/3) or edge point.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> BPoint {
        if self.dim == 0 || self.edges.is_empty() || rng.gen_bool(1.0 / 3.0) {
            BPoint::Vertex(rng.gen_range(0..self.ids.len()))
        } else {
            let edge = rng.gen_range(0..self.edges.len());
            BPoint::Edge { edge, offset: rng.gen_range(0.01..0.99) }
        }
    }

    /// Decodes a wire point; edge offsets are taken from the first listed endpoint.
    pub fn resolve(&self, p: &BPointJson) -> Result<BPoint, BuildingError> {
        let vertex = |v: &serde_json::Value| {
            let s = id_string(v);
            self.ids.iter().position(|x| *x == s).ok_or(BuildingError::UnknownVertex(s))
        };
        let (edge, offset) = match p {
            BPointJson::Vertex { vertex: v } => return Ok(BPoint::Vertex(vertex(v)?)),
            BPointJson::EdgeRational { edge, offset_num, offset_den } => {
                if *offset_den == 0 {
                    return Err(BuildingError::Malformed("zero offset denominator".into()));
                }
                (edge, *offset_num as f64 / *offset_den as f64)
            }
            BPointJson::Edge { edge, offset } => (edge, *offset),
        };
        let (u, v) = (vertex(&edge[0])?, vertex(&edge[1])?);
        let e = self
            .edge_between(u, v)
            .ok_or_else(|| BuildingError::NotAnEdge(self.ids[u].clone(), self.ids[v].clone()))?;
        if !(offset > 0.0 && offset < 1.0) {
            return Err(BuildingError::BadOffset(offset));
        }
        let from_type0 = if self.edges[e].0 == u { offset } else { 1.0 - offset };
        Ok(BPoint::Edge { edge: e, offset: from_type0 })
    }

    /// Encodes a point with the type-0 endpoint listed first.
    pub fn encode(&self, p: &BPoint) -> BPointJson {
        match *p {
            BPoint::Vertex(v) => BPointJson::Vertex { vertex: id_value(&self.ids[v]) },
            BPoint::Edge { edge, offset } => {
                let (a, b) = self.edges[edge];
                BPointJson::Edge { edge: [id_value(&self.ids[a]), id_value(&self.ids[b])], offset }
            }
        }
    }
}

fn all_pairs_bfs(adj: &[Vec<(usize, usize)>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut dist = vec![vec![u32::MAX; n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        row[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if row[w] == u32::MAX {
                    row[w] = row[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

/// Length of a shortest cycle, by BFS from every vertex.
fn girth(adj: &[Vec<(usize, usize)>]) -> Option<usize> {
    let n = adj.len();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    let c = dist[v] + dist[w] + 1;
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
            }
        }
    }
    best
}
