//! Closing polygons as fixed points of `Phi = phi_n o ... o phi_1`.

use serde::{Deserialize, Serialize};

use super::{Ambient, Polygon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureOptions {
    /// Target displacement `d(x, Phi x)`.
    pub tol: f64,
    pub max_iter: u64,
    /// Tolerance for the semistability pre-check.
    pub stability_tol: f64,
    /// Plain iteration switches to averaging when the displacement fails to
    /// halve over this many steps.
    pub stall_window: u64,
    /// Averaged iterations between recorded displacement checkpoints.
    pub checkpoint: u64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { tol: 1e-9, max_iter: 1_000_000, stability_tol: 1e-9, stall_window: 64, checkpoint: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureStatus {
    FixedPoint,
    Diverged,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureResult<P, I> {
    pub status: ClosureStatus,
    /// Last iterate; the fixed point `x_n` on success.
    pub point: P,
    pub displacement: f64,
    pub iterations: u64,
    /// Iteration at which averaging started.
    pub averaged_from: Option<u64>,
    pub min_slope: f64,
    /// Direction of minimal slope and the slope there, when the configuration is unstable.
    pub witness: Option<(I, f64)>,
    /// Displacement at the latest checkpoint of the averaged phase.
    pub tail_radius: f64,
    /// Displacements recorded at checkpoints of the averaged phase.
    pub tail_trend: Vec<f64>,
    /// Vertices `x_1, ..., x_n` with `x_i = phi_i(x_{i-1})`, on success.
    pub polygon: Option<Polygon<P>>,
    /// `d(x_n, x_0)` for the reconstructed polygon.
    pub closure_gap: f64,
    pub note: Option<String>,
}

fn apply<A: Ambient<S = f64>>(ambient: &A, entries: &[(A::Ideal, f64)], x: &A::Point) -> A::Point {
    entries.iter().fold(x.clone(), |p, (xi, m)| ambient.phi(xi, *m, &p))
}

/// Searches for a fixed point of `Phi` starting from `x0`.
///
/// An unstable configuration is rejected up front with the direction of
/// negative slope as witness. Otherwise `Phi` is iterated; when the
/// displacement stalls, iteration continues with midpoints `(x + Phi x)/2`.
/// A run whose displacement stays constant over many averaged checkpoints is
/// reported as inconclusive.
pub fn close_polygon<A: Ambient<S = f64>>(
    ambient: &A,
    entries: &[(A::Ideal, f64)],
    x0: A::Point,
    opts: &ClosureOptions,
) -> ClosureResult<A::Point, A::Ideal> {
    let stab = ambient.stability(entries, opts.stability_tol);
    let mut x = x0;
    let mut fx = apply(ambient, entries, &x);
    let mut disp = ambient.distance(&x, &fx);
    let mut result = ClosureResult {
        status: ClosureStatus::Inconclusive,
        point: x.clone(),
        displacement: disp,
        iterations: 0,
        averaged_from: None,
        min_slope: stab.min_slope,
        witness: None,
        tail_radius: disp,
        tail_trend: Vec::new(),
        polygon: None,
        closure_gap: f64::NAN,
        note: None,
    };
    if stab.min_slope < -opts.stability_tol {
        result.status = ClosureStatus::Diverged;
        result.witness = Some((stab.argmin, stab.min_slope));
        result.note = Some("configuration is unstable, so Phi has no fixed point".into());
        return result;
    }

    let base = ambient.base_point();
    let mut iterations = 0u64;
    let mut averaged_from: Option<u64> = None;
    let mut last_check = disp;
    let mut trend: Vec<f64> = Vec::new();
    let mut radii: Vec<f64> = Vec::new();
    let mut note = None;
    while disp > opts.tol && iterations < opts.max_iter {
        x = if averaged_from.is_some() { ambient.midpoint(&x, &fx) } else { fx.clone() };
        fx = apply(ambient, entries, &x);
        disp = ambient.distance(&x, &fx);
        iterations += 1;
        match averaged_from {
            None => {
                if iterations % opts.stall_window == 0 {
                    if disp > 0.5 * last_check {
                        averaged_from = Some(iterations);
                    }
                    last_check = disp;
                }
            }
            Some(start) => {
                if (iterations - start) % opts.checkpoint == 0 {
                    trend.push(disp);
                    radii.push(ambient.distance(&base, &x));
                    if drifting(&trend, &radii) {
                        note = Some(format!(
                            "displacement constant at {disp:.3e} while the iterates move away; orbit drifts in a flat"
                        ));
                        break;
                    }
                }
            }
        }
    }

    result.point = x.clone();
    result.displacement = disp;
    result.iterations = iterations;
    result.averaged_from = averaged_from;
    result.tail_radius = trend.last().copied().unwrap_or(disp);
    result.tail_trend = trend;
    if disp <= opts.tol {
        let mut vertices = Vec::with_capacity(entries.len());
        let mut p = x.clone();
        for (xi, m) in entries {
            p = ambient.phi(xi, *m, &p);
            vertices.push(p.clone());
        }
        result.closure_gap = ambient.distance(&p, &x);
        result.polygon = Some(Polygon::new(if vertices.is_empty() { vec![x] } else { vertices }));
        result.status = ClosureStatus::FixedPoint;
    } else {
        result.note = note.or_else(|| Some(format!("iteration budget exhausted at displacement {disp:.3e}")));
    }
    result
}

fn drifting(trend: &[f64], radii: &[f64]) -> bool {
    const WINDOW: usize = 10;
    if trend.len() < WINDOW {
        return false;
    }
    let t = &trend[trend.len() - WINDOW..];
    let r = &radii[radii.len() - WINDOW..];
    let flat = t.iter().all(|d| (d - t[0]).abs() <= 1e-9 * t[0].max(1e-300));
    let receding = r.windows(2).all(|w| w[1] > w[0]);
    flat && receding
}
