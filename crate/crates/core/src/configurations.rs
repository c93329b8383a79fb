//! Weighted configurations on spherical buildings and their slope functions.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coxeter::DeltaVector;
use crate::spherical_building::{
    build_spherical, BPoint, BPointJson, BuildingError, BuildingGraph, BuildingSpec,
};

/// Default tolerance around zero for stability classification.
pub const STABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    SemistableNotStable,
    Unstable,
}

impl Stability {
    pub fn classify(min_slope: f64, tol: f64) -> Self {
        if min_slope > tol {
            Stability::Stable
        } else if min_slope >= -tol {
            Stability::SemistableNotStable
        } else {
            Stability::Unstable
        }
    }

    pub fn is_semistable(self) -> bool {
        self != Stability::Unstable
    }
}

/// Points `xi_i` of a building with masses `m_i >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedConfiguration {
    pub building: Arc<BuildingGraph>,
    pub entries: Vec<(BPoint, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMinimum {
    pub edge: usize,
    pub min_slope: f64,
    pub at: BPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub min_slope: f64,
    pub argmin: BPoint,
    pub classification: Stability,
    pub per_edge_minima: Vec<EdgeMinimum>,
}

impl WeightedConfiguration {
    pub fn new(building: Arc<BuildingGraph>, entries: Vec<(BPoint, f64)>) -> Self {
        WeightedConfiguration { building, entries }
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// `-sum m_i cos(angle(xi_i, eta))`.
    pub fn slope_at(&self, eta: &BPoint) -> f64 {
        -self
            .entries
            .iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|(xi, m)| m * self.building.tits_distance(xi, eta).cos())
            .sum::<f64>()
    }

    /// Exact global minimum of the slope function, classified with [`STABILITY_TOL`].
    pub fn min_slope(&self) -> StabilityReport {
        self.min_slope_with_tol(STABILITY_TOL)
    }

    pub fn min_slope_with_tol(&self, tol: f64) -> StabilityReport {
        let b = &self.building;
        let mut per_edge_minima = Vec::new();
        let (mut best, mut argmin) = (f64::INFINITY, BPoint::Vertex(0));
        if b.dim() == 0 {
            for p in b.vertices() {
                let s = self.slope_at(&p);
                if s < best {
                    best = s;
                    argmin = p;
                }
            }
        } else {
            for edge in 0..b.edge_count() {
                let em = self.edge_minimum(edge);
                if em.min_slope < best {
                    best = em.min_slope;
                    argmin = em.at;
                }
                per_edge_minima.push(em);
            }
        }
        StabilityReport {
            min_slope: best,
            argmin,
            classification: Stability::classify(best, tol),
            per_edge_minima,
        }
    }

    /// Minimum of the slope over one closed edge.
    ///
    /// Each distance to an atom is piecewise affine in the edge parameter with
    /// slopes in `{-1, 0, 1}`; between breakpoints the slope function is
    /// `A cos(phi) + B sin(phi) + C`, whose minimum is found in closed form.
    pub fn edge_minimum(&self, edge: usize) -> EdgeMinimum {
        let b = &self.building;
        let (a, c) = b.edges()[edge];
        let m = b.m() as f64;
        let w = b.edge_length();
        let atoms: Vec<(f64, Branches)> = self
            .entries
            .iter()
            .filter(|(_, mass)| *mass > 0.0)
            .map(|(xi, mass)| {
                let branches = match *xi {
                    BPoint::Edge { edge: e, offset } if e == edge => Branches::Same(offset),
                    _ => Branches::Other {
                        to_start: b.distance_units(xi, &BPoint::Vertex(a)),
                        to_end: b.distance_units(xi, &BPoint::Vertex(c)),
                    },
                };
                (*mass, branches)
            })
            .collect();

        let mut breaks = vec![0.0, 1.0];
        for (_, br) in &atoms {
            match *br {
                Branches::Same(s) => breaks.push(s),
                Branches::Other { to_start, to_end } => {
                    breaks.push((1.0 + to_end - to_start) / 2.0);
                    breaks.push(m - to_start);
                    breaks.push(1.0 + to_end - m);
                }
            }
        }
        breaks.retain(|t| (0.0..=1.0).contains(t));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let mut candidates = breaks.clone();
        for pair in breaks.windows(2) {
            let (t0, t1) = (pair[0], pair[1]);
            if t1 - t0 <= 0.0 {
                continue;
            }
            let mid = 0.5 * (t0 + t1);
            let (mut ca, mut cb) = (0.0, 0.0);
            for (mass, br) in &atoms {
                let (base, sigma) = br.affine_at(mid, m);
                if sigma != 0.0 {
                    let angle = base * w;
                    ca -= mass * angle.cos();
                    cb += mass * sigma * angle.sin();
                }
            }
            if ca == 0.0 && cb == 0.0 {
                continue;
            }
            let phi = (-cb).atan2(-ca);
            let (lo, hi) = (t0 * w, t1 * w);
            for k in [-1.0, 0.0, 1.0] {
                let p = phi + 2.0 * PI * k;
                if p > lo && p < hi {
                    candidates.push(p / w);
                }
            }
        }

        let mut best = EdgeMinimum { edge, min_slope: f64::INFINITY, at: BPoint::Vertex(a) };
        for t in candidates {
            let p = b.edge_point(edge, t);
            let s = self.slope_at(&p);
            if s < best.min_slope {
                best.min_slope = s;
                best.at = p;
            }
        }
        best
    }

    /// `h_i = m_i` at type `accordion(xi_i)`.
    pub fn delta_weights(&self) -> Vec<DeltaVector> {
        self.entries
            .iter()
            .map(|(xi, m)| DeltaVector::new(*m, self.building.accordion(xi)))
            .collect()
    }

    /// Same configuration with all masses multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        WeightedConfiguration {
            building: self.building.clone(),
            entries: self.entries.iter().map(|(p, m)| (*p, m * c)).collect(),
        }
    }

    pub fn to_spec(&self) -> ConfigSpec {
        ConfigSpec {
            building: self.building.spec().clone(),
            entries: self
                .entries
                .iter()
                .map(|(p, m)| EntrySpec { at: self.building.encode(p), mass: *m })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Branches {
    Same(f64),
    Other { to_start: f64, to_end: f64 },
}

impl Branches {
    /// Distance at `t` written as `base + sigma * t`.
    fn affine_at(&self, t: f64, m: f64) -> (f64, f64) {
        match *self {
            Branches::Same(s) => {
                if t >= s {
                    (-s, 1.0)
                } else {
                    (s, -1.0)
                }
            }
            Branches::Other { to_start, to_end } => {
                let forward = t + to_start;
                let backward = 1.0 - t + to_end;
                if forward.min(backward) >= m {
                    (m, 0.0)
                } else if forward <= backward {
                    (to_start, 1.0)
                } else {
                    (1.0 + to_end, -1.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub at: BPointJson,
    pub mass: f64,
}

/// Wire form of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub building: BuildingSpec,
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error("configuration has no entries")]
    Empty,
    #[error("mass {0} is negative or not finite")]
    BadMass(f64),
}

impl ConfigSpec {
    pub fn load(&self) -> Result<WeightedConfiguration, ConfigError> {
        let building = Arc::new(build_spherical(&self.building)?);
        self.load_on(building)
    }

    pub fn load_on(&self, building: Arc<BuildingGraph>) -> Result<WeightedConfiguration, ConfigError> {
        if self.entries.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            if !(e.mass.is_finite() && e.mass >= 0.0) {
                return Err(ConfigError::BadMass(e.mass));
            }
            entries.push((building.resolve(&e.at)?, e.mass));
        }
        Ok(WeightedConfiguration { building, entries })
    }
}
