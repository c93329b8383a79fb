//! Membership in the spaces of Δ-weights of semistable configurations.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configurations::{EntrySpec, WeightedConfiguration, STABILITY_TOL};
use crate::coxeter::DeltaVector;
use crate::scalar::SNAP;
use crate::spherical_building::{BPoint, BuildingError, BuildingGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("type {theta} is incompatible with the chamber [0, {width}]")]
    Type { theta: f64, width: f64 },
    #[error("mass {0} is negative or not finite")]
    BadMass(f64),
    #[error("buildings have different Weyl chambers (m = {0} and m = {1})")]
    MismatchedChamber(u32, u32),
    #[error("resolution must be positive")]
    Resolution,
    #[error("expected {expected} types, got {got}")]
    TypeCount { expected: usize, got: usize },
    #[error(transparent)]
    Building(#[from] BuildingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult {
    pub member: bool,
    /// Semistable configuration with the given Δ-weights.
    pub witness: Option<WeightedConfiguration>,
    /// Whether the search covered every placement.
    pub exhaustive: bool,
    /// Minimal slope of the witness.
    pub min_slope: Option<f64>,
}

fn check_weights(h: &[DeltaVector], b: &BuildingGraph) -> Result<(), WeightError> {
    let width = if b.dim() == 0 { 0.0 } else { b.edge_length() };
    for d in h {
        if !(d.length.is_finite() && d.length >= 0.0) {
            return Err(WeightError::BadMass(d.length));
        }
        if d.length > 0.0 && !(-SNAP..=width + SNAP).contains(&d.theta) {
            return Err(WeightError::Type { theta: d.theta, width });
        }
    }
    Ok(())
}

/// Whether `h` is the list of Δ-weights of a semistable configuration on `b`.
///
/// For a 0-dimensional building this is the polygon inequality
/// `2 max m_i <= sum m_i`. In dimension one every placement of atoms at
/// points of the prescribed types is tested.
pub fn membership(h: &[DeltaVector], b: &Arc<BuildingGraph>) -> Result<MembershipResult, WeightError> {
    check_weights(h, b)?;
    if b.dim() == 0 {
        Ok(rank_one(h, b))
    } else {
        search(h, b)
    }
}

/// `2 max m_i <= sum m_i` within [`STABILITY_TOL`].
pub fn polygon_inequality(masses: &[f64]) -> bool {
    let sum: f64 = masses.iter().sum();
    let max = masses.iter().cloned().fold(0.0, f64::max);
    2.0 * max <= sum + STABILITY_TOL
}

fn rank_one(h: &[DeltaVector], b: &Arc<BuildingGraph>) -> MembershipResult {
    let masses: Vec<f64> = h.iter().map(|d| d.length).collect();
    let member = polygon_inequality(&masses);
    let mut result = MembershipResult { member, witness: None, exhaustive: true, min_slope: None };
    if !member {
        return result;
    }
    // largest first onto the least loaded point
    let k = b.vertex_count();
    let mut order: Vec<usize> = (0..masses.len()).collect();
    order.sort_by(|&i, &j| masses[j].total_cmp(&masses[i]).then(i.cmp(&j)));
    let mut load = vec![0.0f64; k];
    let mut at = vec![0usize; masses.len()];
    for i in order {
        let v = (0..k).min_by(|&u, &v| load[u].total_cmp(&load[v]).then(u.cmp(&v))).expect("nonempty");
        load[v] += masses[i];
        at[i] = v;
    }
    let cfg = WeightedConfiguration::new(
        b.clone(),
        at.iter().zip(&masses).map(|(&v, &m)| (BPoint::Vertex(v), m)).collect(),
    );
    let s = cfg.min_slope().min_slope;
    if s >= -STABILITY_TOL {
        result.min_slope = Some(s);
        result.witness = Some(cfg);
    } else if let Ok(full) = search(h, b) {
        result.min_slope = full.min_slope;
        result.witness = full.witness;
    }
    result
}

fn search(h: &[DeltaVector], b: &Arc<BuildingGraph>) -> Result<MembershipResult, WeightError> {
    let mut slots: Vec<Vec<BPoint>> = Vec::with_capacity(h.len());
    for d in h {
        slots.push(b.points_of_type(d.theta.clamp(0.0, b.edge_length()))?);
    }
    let active: Vec<usize> = (0..h.len()).filter(|&i| h[i].length > 0.0).collect();
    // atoms with equal weights are interchangeable
    let twin: Vec<Option<usize>> = active
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            (0..j).rev().map(|jj| active[jj]).find(|&p| h[p].length == h[i].length && h[p].theta == h[i].theta)
                .and_then(|p| active.iter().position(|&q| q == p))
        })
        .collect();
    let vertices: Vec<BPoint> = b.vertices().collect();
    let mut index = vec![0usize; active.len()];
    let base: Vec<(BPoint, f64)> = slots.iter().zip(h).map(|(pts, d)| (pts[0], d.length)).collect();
    let mut cfg = WeightedConfiguration::new(b.clone(), base);
    'outer: loop {
        let ordered = twin.iter().enumerate().all(|(j, t)| t.map_or(true, |p| index[p] <= index[j]));
        if ordered {
            for (j, &i) in active.iter().enumerate() {
                cfg.entries[i].0 = slots[i][index[j]];
            }
            let screened = vertices.iter().all(|v| cfg.slope_at(v) >= -STABILITY_TOL);
            if screened {
                let s = cfg.min_slope().min_slope;
                if s >= -STABILITY_TOL {
                    return Ok(MembershipResult { member: true, witness: Some(cfg), exhaustive: true, min_slope: Some(s) });
                }
            }
        }
        let mut k = active.len();
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            index[k] += 1;
            if index[k] < slots[active[k]].len() {
                break;
            }
            index[k] = 0;
        }
    }
    if active.is_empty() {
        return Ok(MembershipResult { member: true, min_slope: Some(0.0), witness: Some(cfg), exhaustive: true });
    }
    Ok(MembershipResult { member: false, witness: None, exhaustive: true, min_slope: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: usize,
    pub weights: Vec<DeltaVector>,
    pub first: bool,
    pub second: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub checked: usize,
    pub members: usize,
    pub disagreements: Vec<Disagreement>,
}

/// Runs [`membership`] on both buildings for every weight tuple.
pub fn compare_buildings(
    grid: &[Vec<DeltaVector>],
    b: &Arc<BuildingGraph>,
    b2: &Arc<BuildingGraph>,
) -> Result<AgreementReport, WeightError> {
    if b.dim() != b2.dim() || b.m() != b2.m() {
        return Err(WeightError::MismatchedChamber(b.m(), b2.m()));
    }
    let mut report = AgreementReport { checked: 0, members: 0, disagreements: Vec::new() };
    for (index, h) in grid.iter().enumerate() {
        let first = membership(h, b)?.member;
        let second = membership(h, b2)?.member;
        report.checked += 1;
        report.members += usize::from(first);
        if first != second {
            report.disagreements.push(Disagreement { index, weights: h.clone(), first, second });
        }
    }
    Ok(report)
}

/// Sampling of `n`-tuples of Δ-weights with fixed types; the last mass is held at `last_mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub n: usize,
    /// Types of the `n` weights; empty means all `0`.
    #[serde(default)]
    pub types: Vec<f64>,
    /// Points per free axis on a grid, or the sample count with a seed.
    pub resolution: usize,
    #[serde(default = "default_max_mass")]
    pub max_mass: f64,
    #[serde(default = "default_last_mass")]
    pub last_mass: f64,
    /// Uniform random masses instead of a grid.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_max_mass() -> f64 {
    2.0
}

fn default_last_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub weights: Vec<DeltaVector>,
    pub member: bool,
    pub witness: Option<Vec<EntrySpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub n: usize,
    pub rows: Vec<SampleRow>,
}

/// Membership flags over a grid (cell centres) or seeded random sample of masses.
pub fn sample_pn(b: &Arc<BuildingGraph>, opts: &SampleOptions) -> Result<Dataset, WeightError> {
    if opts.resolution == 0 {
        return Err(WeightError::Resolution);
    }
    let types = if opts.types.is_empty() { vec![0.0; opts.n] } else { opts.types.clone() };
    if types.len() != opts.n {
        return Err(WeightError::TypeCount { expected: opts.n, got: types.len() });
    }
    let free = opts.n.saturating_sub(1);
    let mut tuples: Vec<Vec<f64>> = Vec::new();
    match opts.seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..opts.resolution {
                tuples.push((0..free).map(|_| rng.gen_range(0.0..=opts.max_mass)).collect());
            }
        }
        None => {
            let step = opts.max_mass / opts.resolution as f64;
            let mut index = vec![0usize; free];
            loop {
                tuples.push(index.iter().map(|&i| (i as f64 + 0.5) * step).collect());
                let mut k = 0;
                while k < free {
                    index[k] += 1;
                    if index[k] < opts.resolution {
                        break;
                    }
                    index[k] = 0;
                    k += 1;
                }
                if k == free {
                    break;
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(tuples.len());
    for mut masses in tuples {
        if opts.n > 0 {
            masses.push(opts.last_mass);
        }
        let weights: Vec<DeltaVector> = masses.iter().zip(&types).map(|(&m, &t)| DeltaVector::new(m, t)).collect();
        let r = membership(&weights, b)?;
        let witness = r.witness.map(|w| w.to_spec().entries);
        rows.push(SampleRow { weights, member: r.member, witness });
    }
    Ok(Dataset { n: opts.n, rows })
}

impl Dataset {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    /// Columns `m_i`, `theta_i`, `member`, `witness` (JSON list of entries).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (1..=self.n).map(|i| format!("m{i}")).collect();
        header.extend((1..=self.n).map(|i| format!("theta{i}")));
        header.push("member".into());
        header.push("witness".into());
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec: Vec<String> = row.weights.iter().map(|d| d.length.to_string()).collect();
            rec.extend(row.weights.iter().map(|d| d.theta.to_string()));
            rec.push(row.member.to_string());
            rec.push(row.witness.as_ref().map(|e| serde_json::to_string(e).expect("entries serialize")).unwrap_or_default());
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Columns `length`, `theta`.
pub fn weights_csv(h: &[DeltaVector]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["length", "theta"]).expect("in-memory write");
    for d in h {
        w.write_record([d.length.to_string(), d.theta.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
