//! Sampling audits of prox-regularity and of the variation modulus.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::grid::TimeGrid;
use crate::sampling::{gaussian, in_ball, unit_vector, AuditRng};

use super::set::{MovingSet, Shape};
use super::Point;

/// Margins above this count as violations of the prox inequality.
pub const PROX_AUDIT_TOL: f64 = 1e-12;

/// Scales, relative to the set's own size, at which test points are drawn
/// around a sampled boundary point.
const PROBE_SCALES: [f64; 5] = [1e-3, 1e-2, 0.1, 0.5, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProxViolation {
    pub base: Vec<f64>,
    pub normal: Vec<f64>,
    pub test: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProxAuditReport {
    pub samples_checked: usize,
    /// Largest `lhs - rhs` seen; `-inf` when nothing could be sampled.
    pub worst_slack: f64,
    pub violations: Vec<ProxViolation>,
}

impl ProxAuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl MovingSet {
    /// Characteristic length used to size sampling neighbourhoods.
    pub(crate) fn sampling_scale(&self, t: f64) -> f64 {
        match self.shape() {
            Shape::HalfSpace { .. } => 1.0,
            Shape::Ball { radius, .. } | Shape::BallComplement { radius, .. } => *radius,
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(lo, hi)| hi.value(t) - lo.value(t))
                .fold(0.0, f64::max)
                .max(1e-3),
            Shape::Translated { base, .. } => base.sampling_scale(t),
            Shape::Product(ps) => ps.block().sampling_scale(t),
        }
    }

    /// A boundary point of `K(t)` together with a unit proximal normal there.
    pub(crate) fn sample_boundary_normal(
        &self,
        t: f64,
        rng: &mut AuditRng,
    ) -> Option<(Point, Point)> {
        match self.shape() {
            Shape::HalfSpace { normal, offset } => {
                let g = gaussian(rng, normal.len());
                let tangent = &g - normal * normal.dot(&g);
                let base = normal * offset.value(t) + tangent;
                Some((base, -normal.clone()))
            }
            Shape::Ball { center, radius } => {
                let v = unit_vector(rng, center.dim())?;
                Some((center.value(t) + &v * *radius, v))
            }
            Shape::BallComplement { center, radius } => {
                let v = unit_vector(rng, center.dim())?;
                Some((center.value(t) + &v * *radius, -v))
            }
            Shape::Box { lower, upper } => {
                let d = lower.len();
                if d == 0 {
                    return None;
                }
                let axis = rng.random_range(0..d);
                let upper_face = rng.random_bool(0.5);
                let mut base = DVector::from_iterator(
                    d,
                    lower.iter().zip(upper).map(|(lo, hi)| {
                        let (a, b) = (lo.value(t), hi.value(t));
                        a + (b - a) * rng.random::<f64>()
                    }),
                );
                let mut normal = DVector::zeros(d);
                if upper_face {
                    base[axis] = upper[axis].value(t);
                    normal[axis] = 1.0;
                } else {
                    base[axis] = lower[axis].value(t);
                    normal[axis] = -1.0;
                }
                Some((base, normal))
            }
            Shape::Translated { base, shift } => {
                let (b, n) = base.sample_boundary_normal(t, rng)?;
                Some((b + shift.value(t), n))
            }
            Shape::Product(ps) => {
                let (b, n) = ps.block().sample_boundary_normal(t, rng)?;
                let scale = ps.block().sampling_scale(t);
                let free = gaussian(rng, ps.free_dims()) * scale;
                let mut base = DVector::zeros(ps.dim());
                base.rows_mut(0, b.len()).copy_from(&b);
                base.rows_mut(b.len(), ps.free_dims()).copy_from(&free);
                let mut normal = DVector::zeros(ps.dim());
                normal.rows_mut(0, n.len()).copy_from(&n);
                Some((base, normal))
            }
        }
    }

    /// A point of `K(t)` near `around`, obtained by projecting a random
    /// perturbation. `None` if the perturbed point left the uniqueness tube.
    pub(crate) fn sample_member_near(
        &self,
        t: f64,
        around: &Point,
        radius: f64,
        rng: &mut AuditRng,
    ) -> Option<Point> {
        let z = around + in_ball(rng, around.len(), radius);
        self.project_unchecked(t, &z).ok()
    }
}

/// `⟨ξ, x - x̄⟩` and `‖x - x̄‖² / (2r)` with the convention `1/∞ = 0`.
pub(crate) fn prox_sides(normal: &Point, base: &Point, x: &Point, prox_radius: f64) -> (f64, f64) {
    let diff = x - base;
    let lhs = normal.dot(&diff);
    let rhs = if prox_radius.is_infinite() {
        0.0
    } else {
        diff.norm_squared() / (2.0 * prox_radius)
    };
    (lhs, rhs)
}

/// Checks the hypomonotonicity inequality `⟨ξ/‖ξ‖, x - x̄⟩ <= ‖x - x̄‖²/(2r)`
/// on `n_samples` random triples, with `r` the set's declared prox radius.
pub fn prox_inequality_audit(
    set: &MovingSet,
    t: f64,
    n_samples: usize,
    rng_seed: u64,
) -> ProxAuditReport {
    let mut rng = crate::sampling::rng(rng_seed);
    let r = set.prox_radius();
    let scale = set.sampling_scale(t);
    let mut report = ProxAuditReport {
        samples_checked: 0,
        worst_slack: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for i in 0..n_samples {
        let Some((base, normal)) = set.sample_boundary_normal(t, &mut rng) else {
            break;
        };
        let radius = scale * PROBE_SCALES[i % PROBE_SCALES.len()];
        let Some(x) = set.sample_member_near(t, &base, radius, &mut rng) else {
            continue;
        };
        let (lhs, rhs) = prox_sides(&normal, &base, &x, r);
        let slack = lhs - rhs;
        report.samples_checked += 1;
        report.worst_slack = report.worst_slack.max(slack);
        if slack > PROX_AUDIT_TOL {
            report.violations.push(ProxViolation {
                base: base.iter().copied().collect(),
                normal: normal.iter().copied().collect(),
                test: x.iter().copied().collect(),
                lhs,
                rhs,
            });
        }
    }
    report
}

/// Largest ratio `|d(u,K(t)) - d(u,K(s))| / |a(t) - a(s)|` over all grid pairs
/// and probe points, with `0/0 = 0` and `x/0 = ∞` for `x > 0`.
pub fn variation_audit(set: &MovingSet, grid: &TimeGrid, probes: &[Point]) -> f64 {
    variation_audit_with(set, grid, probes, |t| set.variation(t))
}

/// As [`variation_audit`], against an arbitrary candidate modulus.
pub fn variation_audit_with<A: Fn(f64) -> f64>(
    set: &MovingSet,
    grid: &TimeGrid,
    probes: &[Point],
    modulus: A,
) -> f64 {
    let nodes: Vec<f64> = grid.nodes().collect();
    let modulus: Vec<f64> = nodes.iter().map(|&t| modulus(t)).collect();
    let distances: Vec<Vec<f64>> = probes
        .iter()
        .map(|u| {
            nodes
                .iter()
                .map(|&t| set.distance_unchecked(t, u))
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for j in 0..nodes.len() {
        for k in (j + 1)..nodes.len() {
            let da = (modulus[k] - modulus[j]).abs();
            for row in &distances {
                let dd = (row[k] - row[j]).abs();
                let ratio = match (dd == 0.0, da == 0.0) {
                    (true, _) => 0.0,
                    (false, true) => f64::INFINITY,
                    (false, false) => dd / da,
                };
                worst = worst.max(ratio);
            }
        }
    }
    worst
}

/// Probe points scattered on both sides of the boundary of `K(t)`.
pub fn probe_points(set: &MovingSet, t: f64, count: usize, rng_seed: u64) -> Vec<Point> {
    let mut rng = crate::sampling::rng(rng_seed);
    let scale = set.sampling_scale(t);
    (0..count)
        .map(|_| {
            let noise = gaussian(&mut rng, set.dim()) * (2.0 * scale);
            match set.sample_boundary_normal(t, &mut rng) {
                Some((base, _)) => base + noise,
                None => noise,
            }
        })
        .collect()
}
