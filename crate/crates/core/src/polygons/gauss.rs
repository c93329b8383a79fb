//! Gauss maps of polygons and their semistability.

use rand::RngCore;

use super::{Ambient, Polygon};
use crate::scalar::Scalar;

/// All Gauss maps of a polygon: per side, the admissible ideal points (canonical first).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussMaps<I, S> {
    pub choices: Vec<Vec<I>>,
    pub masses: Vec<S>,
}

impl<I: Clone, S: Scalar> GaussMaps<I, S> {
    /// The canonical Gauss configuration.
    pub fn canonical(&self) -> Vec<(I, S)> {
        self.choices.iter().zip(&self.masses).map(|(c, m)| (c[0].clone(), *m)).collect()
    }

    /// Number of distinct Gauss maps, saturating.
    pub fn count(&self) -> u64 {
        self.choices.iter().fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64))
    }

    /// The configuration with the given choice index per side.
    pub fn configuration(&self, index: &[usize]) -> Vec<(I, S)> {
        self.choices
            .iter()
            .zip(&self.masses)
            .zip(index)
            .map(|((c, m), &i)| (c[i].clone(), *m))
            .collect()
    }

    /// Every Gauss configuration, in lexicographic order of choice indices.
    pub fn all(&self) -> Vec<Vec<(I, S)>> {
        let mut out = Vec::new();
        let mut index = vec![0usize; self.choices.len()];
        loop {
            out.push(self.configuration(&index));
            let mut k = 0;
            loop {
                if k == index.len() {
                    return out;
                }
                index[k] += 1;
                if index[k] < self.choices[k].len() {
                    break;
                }
                index[k] = 0;
                k += 1;
            }
        }
    }
}

/// Gauss maps: side `i` with `m_i > 0` gets the ideal points `xi_i` such that
/// the ray from `x_{i-1}` to `xi_i` passes through `x_i`; sides of length zero
/// get the canonical ideal point with mass 0.
pub fn gauss_map<A: Ambient>(ambient: &A, p: &Polygon<A::Point>) -> GaussMaps<A::Ideal, A::S> {
    let mut choices = Vec::with_capacity(p.len());
    let mut masses = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let (x, y) = p.side(k);
        let m = ambient.distance(x, y);
        if m <= S0::<A>::zero() {
            choices.push(vec![ambient.canonical_ideal()]);
            masses.push(S0::<A>::zero());
        } else {
            let ext = ambient.extensions(x, y);
            assert!(!ext.is_empty(), "every geodesic segment extends to a ray");
            choices.push(ext);
            masses.push(m);
        }
    }
    GaussMaps { choices, masses }
}

type S0<A> = <A as Ambient>::S;

#[derive(Debug, Clone, PartialEq)]
pub struct SideViolation<I> {
    pub side: usize,
    pub xi: I,
    pub eta: I,
    /// `b_eta(x_i) - b_eta(x_{i-1})`.
    pub increment: f64,
    /// `-m_i cos(angle(xi_i, eta))`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussReport<I> {
    /// Least minimal slope over the checked Gauss configurations.
    pub min_slope: f64,
    pub configurations_checked: usize,
    pub total_configurations: u64,
    pub inequalities_checked: usize,
    pub violations: Vec<SideViolation<I>>,
    pub ok: bool,
}

/// Checks that Gauss configurations of a closed polygon are semistable, and the
/// per-side Busemann increment inequality `b_eta(x_i) - b_eta(x_{i-1}) <= -m_i cos angle(xi_i, eta)`
/// for sampled `eta`. All Gauss configurations are checked when there are at
/// most `max_configurations` of them, otherwise the canonical one.
pub fn verify_gauss_semistable<A: Ambient>(
    ambient: &A,
    p: &Polygon<A::Point>,
    tol: f64,
    samples: usize,
    max_configurations: u64,
    rng: &mut dyn RngCore,
) -> GaussReport<A::Ideal> {
    let maps = gauss_map(ambient, p);
    let total = maps.count();
    let configs = if total <= max_configurations { maps.all() } else { vec![maps.canonical()] };
    let mut min_slope = f64::INFINITY;
    for cfg in &configs {
        let entries: Vec<(A::Ideal, f64)> = cfg.iter().map(|(xi, m)| (xi.clone(), m.to_f64())).collect();
        min_slope = min_slope.min(ambient.stability(&entries, tol).min_slope);
    }

    let mut etas = ambient.sample_ideals(rng, &p.vertices, samples);
    for c in &maps.choices {
        for xi in c {
            if !etas.contains(xi) {
                etas.push(xi.clone());
            }
        }
    }
    let mut violations = Vec::new();
    let mut checked = 0;
    for k in 0..p.len() {
        let (x, y) = p.side(k);
        let m = maps.masses[k].to_f64();
        for eta in &etas {
            let increment = (ambient.busemann(eta, y) - ambient.busemann(eta, x)).to_f64();
            for xi in &maps.choices[k] {
                checked += 1;
                let bound = -m * ambient.tits_angle(xi, eta).cos();
                if increment > bound + tol {
                    violations.push(SideViolation { side: k, xi: xi.clone(), eta: eta.clone(), increment, bound });
                }
            }
        }
    }
    let ok = min_slope >= -tol && violations.is_empty();
    GaussReport {
        min_slope,
        configurations_checked: configs.len(),
        total_configurations: total,
        inequalities_checked: checked,
        violations,
        ok,
    }
}
