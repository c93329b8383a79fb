//! JSON documents for spaces, polygons, tree points and ends.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone_building::{Cone, ConePoint, ConePointJson};
use crate::polygons::Polygon;
use crate::scalar::Rational;
use crate::spherical_building::{build_spherical, BuildingError, BuildingSpec};
use crate::trees::{Tree, TreeError, TreeKind, TreePoint};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error("a polygon needs at least one vertex")]
    EmptyPolygon,
}

/// Ambient space of a polygon: `{"cone": B}`, `{"tree": {"valence": q}}` or `{"spider": {"legs": k}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    Cone(BuildingSpec),
    Tree { valence: u32 },
    Spider { legs: u32 },
}

impl SpaceSpec {
    pub fn tree_kind(&self) -> Option<TreeKind> {
        match *self {
            SpaceSpec::Cone(_) => None,
            SpaceSpec::Tree { valence } => Some(TreeKind::Regular { valence }),
            SpaceSpec::Spider { legs } => Some(TreeKind::Spider { legs }),
        }
    }

    pub fn from_tree_kind(kind: TreeKind) -> Self {
        match kind {
            TreeKind::Regular { valence } => SpaceSpec::Tree { valence },
            TreeKind::Spider { legs } => SpaceSpec::Spider { legs },
        }
    }

    pub fn load(&self) -> Result<Space, IoError> {
        Ok(match self.tree_kind() {
            Some(kind) => Space::Tree(Tree::new(kind)?),
            None => match self {
                SpaceSpec::Cone(b) => Space::Cone(Cone::new(Arc::new(build_spherical(b)?))),
                _ => unreachable!(),
            },
        })
    }
}

#[derive(Debug, Clone)]
pub enum Space {
    Cone(Cone),
    Tree(Tree<Rational>),
}

/// Depth written as `"p/q"`, an integer, or a decimal number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Text(String),
    Int(i64),
    Float(f64),
}

impl RationalJson {
    pub fn value(&self) -> Result<Rational, IoError> {
        match self {
            RationalJson::Text(s) => s.trim().parse().map_err(|_| IoError::Rational(s.clone())),
            RationalJson::Int(i) => Ok(Rational::from_integer(*i)),
            RationalJson::Float(f) => {
                Rational::approximate_float(*f).ok_or_else(|| IoError::Rational(f.to_string()))
            }
        }
    }

    pub fn encode(r: Rational) -> Self {
        RationalJson::Text(r.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePointJson {
    pub path: Vec<u32>,
    pub depth: RationalJson,
}

impl TreePointJson {
    pub fn resolve(&self, tree: &Tree<Rational>) -> Result<TreePoint<Rational>, IoError> {
        Ok(tree.point(self.path.clone(), self.depth.value()?)?)
    }

    pub fn encode(x: &TreePoint<Rational>) -> Self {
        TreePointJson { path: x.path.clone(), depth: RationalJson::encode(x.depth) }
    }
}

/// `{"space": ..., "vertices": [...]}`, vertices `x_1, ..., x_n` with side `i` from `x_{i-1}` to `x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSpec {
    pub space: SpaceSpec,
    pub vertices: Vec<serde_json::Value>,
}

#[derive(Debug, Clone)]
pub enum LoadedPolygon {
    Cone(Cone, Polygon<ConePoint>),
    Tree(Tree<Rational>, Polygon<TreePoint<Rational>>),
}

impl PolygonSpec {
    pub fn load(&self) -> Result<LoadedPolygon, IoError> {
        if self.vertices.is_empty() {
            return Err(IoError::EmptyPolygon);
        }
        match self.space.load()? {
            Space::Cone(cone) => {
                let mut vs = Vec::with_capacity(self.vertices.len());
                for v in &self.vertices {
                    let p: ConePointJson = serde_json::from_value(v.clone())?;
                    vs.push(cone.resolve(&p)?);
                }
                Ok(LoadedPolygon::Cone(cone, Polygon::new(vs)))
            }
            Space::Tree(tree) => {
                let mut vs = Vec::with_capacity(self.vertices.len());
                for v in &self.vertices {
                    let p: TreePointJson = serde_json::from_value(v.clone())?;
                    vs.push(p.resolve(&tree)?);
                }
                Ok(LoadedPolygon::Tree(tree, Polygon::new(vs)))
            }
        }
    }

    pub fn from_cone(cone: &Cone, p: &Polygon<ConePoint>) -> Self {
        PolygonSpec {
            space: SpaceSpec::Cone(cone.building().spec().clone()),
            vertices: p
                .vertices
                .iter()
                .map(|x| serde_json::to_value(cone.encode(x)).expect("point serializes"))
                .collect(),
        }
    }

    pub fn from_tree(tree: &Tree<Rational>, p: &Polygon<TreePoint<Rational>>) -> Self {
        PolygonSpec {
            space: SpaceSpec::from_tree_kind(tree.kind()),
            vertices: p
                .vertices
                .iter()
                .map(|x| serde_json::to_value(TreePointJson::encode(x)).expect("point serializes"))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn tree_polygon_round_trip() {
        let doc = json!({
            "space": {"tree": {"valence": 3}},
            "vertices": [{"path": [1, 0], "depth": "3/2"}, {"path": [], "depth": 0}, {"path": [2], "depth": 0.5}]
        });
        let spec: PolygonSpec = serde_json::from_value(doc).unwrap();
        let LoadedPolygon::Tree(t, p) = spec.load().unwrap() else { panic!() };
        assert_eq!(p.vertices[2].depth, Rational::new(1, 2));
        let again = PolygonSpec::from_tree(&t, &p);
        let LoadedPolygon::Tree(_, q) = again.load().unwrap() else { panic!() };
        assert_eq!(p, q);
    }

    #[test]
    fn cone_polygon_round_trip() {
        let doc = json!({
            "space": {"cone": "fano"},
            "vertices": [{"tip": true}, {"dir": {"vertex": 1}, "r": 2.0}]
        });
        let spec: PolygonSpec = serde_json::from_value(doc).unwrap();
        let LoadedPolygon::Cone(c, p) = spec.load().unwrap() else { panic!() };
        assert!(p.vertices[0].is_tip());
        let again = PolygonSpec::from_cone(&c, &p);
        let text = serde_json::to_string(&again).unwrap();
        let back: PolygonSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, again);
    }

    #[test]
    fn rejects_bad_depth() {
        let doc = json!({"space": {"spider": {"legs": 3}}, "vertices": [{"path": [0, 1], "depth": 1}]});
        let spec: PolygonSpec = serde_json::from_value(doc).unwrap();
        assert!(spec.load().is_err());
    }
}
