//! The Euclidean cone over a spherical building, a Euclidean building with one vertex.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::configurations::WeightedConfiguration;
use crate::coxeter::{DeltaVector, EPoint, EuclideanCoxeterComplex, RefinedLength};
use crate::spherical_building::{BPoint, BPointJson, BuildingError, BuildingGraph};

const PI: f64 = std::f64::consts::PI;

/// Point `(v, r)` of the cone; `r = 0` is the tip, which has no direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint {
    pub dir: Option<BPoint>,
    pub r: f64,
}

impl ConePoint {
    pub const TIP: ConePoint = ConePoint { dir: None, r: 0.0 };

    pub fn new(dir: BPoint, r: f64) -> Self {
        if r <= 0.0 {
            ConePoint::TIP
        } else {
            ConePoint { dir: Some(dir), r }
        }
    }

    pub fn is_tip(&self) -> bool {
        self.dir.is_none()
    }
}

/// Wire form of a [`ConePoint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConePointJson {
    Tip { tip: bool },
    Point { dir: BPointJson, r: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    building: Arc<BuildingGraph>,
    complex: EuclideanCoxeterComplex,
}

impl Cone {
    pub fn new(building: Arc<BuildingGraph>) -> Self {
        let complex = EuclideanCoxeterComplex::one_vertex(building.coxeter());
        Cone { building, complex }
    }

    pub fn building(&self) -> &Arc<BuildingGraph> {
        &self.building
    }

    pub fn complex(&self) -> &EuclideanCoxeterComplex {
        &self.complex
    }

    /// Angle at the tip between `x` and `y`, clamped at `pi`.
    pub fn angle(&self, x: &ConePoint, y: &ConePoint) -> f64 {
        match (x.dir, y.dir) {
            (Some(v), Some(w)) => self.building.tits_distance(&v, &w).min(PI),
            _ => 0.0,
        }
    }

    pub fn distance(&self, x: &ConePoint, y: &ConePoint) -> f64 {
        let beta = self.angle(x, y);
        let (r, s) = (x.r, y.r);
        ((r - s).powi(2) + 4.0 * r * s * (beta / 2.0).sin().powi(2)).max(0.0).sqrt()
    }

    /// Point at distance `t` from `x` on the geodesic to `y`.
    pub fn geodesic_point(&self, x: &ConePoint, y: &ConePoint, t: f64) -> Result<ConePoint, BuildingError> {
        let len = self.distance(x, y);
        if t < -1e-12 || t > len + 1e-12 {
            return Err(BuildingError::OutOfRange { s: t, len });
        }
        let t = t.clamp(0.0, len);
        let (Some(v), Some(w)) = (x.dir, y.dir) else {
            return Ok(match (x.dir, y.dir) {
                (None, Some(w)) => ConePoint::new(w, t),
                (Some(v), None) => ConePoint::new(v, x.r - t),
                _ => ConePoint::TIP,
            });
        };
        let beta = self.angle(x, y);
        if beta >= PI {
            return Ok(if t <= x.r {
                ConePoint::new(v, x.r - t)
            } else {
                ConePoint::new(w, t - x.r)
            });
        }
        if len == 0.0 {
            return Ok(*x);
        }
        let f = t / len;
        let px = x.r + f * (y.r * beta.cos() - x.r);
        let py = f * y.r * beta.sin();
        let alpha = py.atan2(px).clamp(0.0, beta);
        let dir = self.building.geodesic_point(&v, &w, alpha)?;
        Ok(ConePoint::new(dir, px.hypot(py)))
    }

    pub fn midpoint(&self, x: &ConePoint, y: &ConePoint) -> ConePoint {
        let d = self.distance(x, y);
        self.geodesic_point(x, y, d / 2.0).expect("midpoint lies on the geodesic")
    }

    /// Point at distance `t` from `x` on the ray from `x` toward the ideal point `xi`.
    pub fn phi(&self, xi: &BPoint, t: f64, x: &ConePoint) -> ConePoint {
        let Some(v) = x.dir else {
            return ConePoint::new(*xi, t);
        };
        let beta = self.building.tits_distance(&v, xi).min(PI);
        if beta >= PI {
            return if t <= x.r {
                ConePoint::new(v, x.r - t)
            } else {
                ConePoint::new(*xi, t - x.r)
            };
        }
        let px = x.r * beta.cos() + t;
        let py = x.r * beta.sin();
        let gamma = py.atan2(px).clamp(0.0, beta);
        let dir = self
            .building
            .geodesic_point(xi, &v, gamma)
            .expect("angle lies on the geodesic");
        ConePoint::new(dir, px.hypot(py))
    }

    /// Busemann function of `xi`, normalized to vanish at the tip.
    pub fn busemann(&self, xi: &BPoint, x: &ConePoint) -> f64 {
        match x.dir {
            None => 0.0,
            Some(v) => -x.r * self.building.tits_distance(&v, xi).min(PI).cos(),
        }
    }

    pub fn weighted_busemann(&self, cfg: &WeightedConfiguration, x: &ConePoint) -> f64 {
        cfg.entries.iter().map(|(xi, m)| m * self.busemann(xi, x)).sum()
    }

    /// Coordinates of `x` and `y` in a common apartment chart, with `x` in the model chamber.
    pub fn chart(&self, x: &ConePoint, y: &ConePoint) -> ([f64; 2], [f64; 2]) {
        let b = &self.building;
        let polar = |r: f64, a: f64| [r * a.cos(), r * a.sin()];
        match (x.dir, y.dir) {
            (None, None) => ([0.0, 0.0], [0.0, 0.0]),
            (None, Some(w)) => ([0.0, 0.0], polar(y.r, b.accordion(&w))),
            (Some(v), None) => (polar(x.r, b.accordion(&v)), [0.0, 0.0]),
            (Some(v), Some(w)) => {
                if b.dim() == 0 {
                    let sign = if v == w { 1.0 } else { -1.0 };
                    return ([x.r, 0.0], [sign * y.r, 0.0]);
                }
                let a = b.accordion(&v);
                let beta = self.angle(x, y);
                let sigma = b.initial_direction(&v, &w);
                (polar(x.r, a), polar(y.r, a + sigma * beta))
            }
        }
    }

    pub fn delta_length(&self, x: &ConePoint, y: &ConePoint) -> DeltaVector {
        let (p, q) = self.chart(x, y);
        let d = self.complex.chamber_project([q[0] - p[0], q[1] - p[1]]);
        DeltaVector::new(self.distance(x, y), d.theta)
    }

    pub fn refined_length(&self, x: &ConePoint, y: &ConePoint) -> RefinedLength {
        let (p, q) = self.chart(x, y);
        self.complex
            .refined_length(&EPoint::Real(p), &EPoint::Real(q))
            .expect("chart coordinates match the rank")
    }

    pub fn resolve(&self, p: &ConePointJson) -> Result<ConePoint, BuildingError> {
        match p {
            ConePointJson::Tip { .. } => Ok(ConePoint::TIP),
            ConePointJson::Point { dir, r } => {
                if !(r.is_finite() && *r >= 0.0) {
                    return Err(BuildingError::Malformed(format!("radius {r} must be >= 0")));
                }
                Ok(ConePoint::new(self.building.resolve(dir)?, *r))
            }
        }
    }

    pub fn encode(&self, p: &ConePoint) -> ConePointJson {
        match p.dir {
            None => ConePointJson::Tip { tip: true },
            Some(d) => ConePointJson::Point { dir: self.building.encode(&d), r: p.r },
        }
    }
}
