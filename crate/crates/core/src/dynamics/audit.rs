//! Seeded falsification audits for the growth and local Lipschitz hypotheses.
//!
//! The lifted variants draw exactly the same samples as the plain ones for a
//! given seed, so transfer properties can be checked sample by sample.

use rand::Rng;
use serde::Serialize;

use crate::geometry::Point;
use crate::grid::TimeGrid;
use crate::sampling::{gaussian, in_ball, unit_vector, AuditRng};

use super::{LiftedPerturbation, Perturbation};

/// Relative slack on the growth envelope before a sample counts as a violation.
pub const GROWTH_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthViolation {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub norm: f64,
    pub bound: f64,
}

fn random_node(rng: &mut AuditRng, grid: &TimeGrid) -> f64 {
    grid.node(rng.random_range(0..=grid.steps()))
}

/// A vector with norm at most `radius`; one draw in eight sits exactly on the sphere.
fn radial_draw(rng: &mut AuditRng, dim: usize, radius: f64) -> Point {
    let Some(dir) = unit_vector(rng, dim) else {
        return Point::zeros(0);
    };
    let r = if rng.random_range(0..8) == 0 {
        radius
    } else {
        radius * rng.random::<f64>()
    };
    dir * r
}

fn growth_samples(
    dim: usize,
    grid: &TimeGrid,
    n_samples: usize,
    radius: f64,
    rng_seed: u64,
) -> Vec<(f64, Point, Point)> {
    let mut rng = crate::sampling::rng(rng_seed);
    (0..n_samples)
        .map(|_| {
            let t = random_node(&mut rng, grid);
            let x = radial_draw(&mut rng, dim, radius);
            let u = radial_draw(&mut rng, dim, radius);
            (t, x, u)
        })
        .collect()
}

/// Samples `(t, x, u)` with `‖x‖, ‖u‖ <= radius` and records every sample where
/// `‖f(t,x,u)‖ > c(t)(1 + ‖x‖ + ‖u‖)`.
pub fn audit_growth(
    f: &Perturbation,
    grid: &TimeGrid,
    n_samples: usize,
    radius: f64,
    rng_seed: u64,
) -> Vec<GrowthViolation> {
    growth_samples(f.dim(), grid, n_samples, radius, rng_seed)
        .into_iter()
        .filter_map(|(t, x, u)| {
            let norm = f.evaluate_unchecked(t, &x, &u).norm();
            let bound = f.growth(t) * (1.0 + x.norm() + u.norm());
            (norm > bound * (1.0 + GROWTH_REL_TOL)).then(|| GrowthViolation {
                t,
                x: x.iter().copied().collect(),
                u: u.iter().copied().collect(),
                norm,
                bound,
            })
        })
        .collect()
}

/// Growth audit of the lift `g` against `β = c + 1`, in the sum norm on the
/// product, over the same samples [`audit_growth`] draws for `f`.
pub fn audit_growth_lifted(
    g: &LiftedPerturbation,
    grid: &TimeGrid,
    n_samples: usize,
    radius: f64,
    rng_seed: u64,
) -> Vec<GrowthViolation> {
    let d = g.source().dim();
    growth_samples(d, grid, n_samples, radius, rng_seed)
        .into_iter()
        .filter_map(|(t, x, u)| {
            let mut state = Point::zeros(2 * d);
            state.rows_mut(0, d).copy_from(&u);
            state.rows_mut(d, d).copy_from(&x);
            let out = g.evaluate_unchecked(t, &state);
            let norm = out.rows(0, d).norm() + out.rows(d, d).norm();
            let bound = g.beta(t) * (1.0 + u.norm() + x.norm());
            (norm > bound * (1.0 + GROWTH_REL_TOL)).then(|| GrowthViolation {
                t,
                x: x.iter().copied().collect(),
                u: u.iter().copied().collect(),
                norm,
                bound,
            })
        })
        .collect()
}

struct LipschitzPair {
    t: f64,
    x: Point,
    u: Point,
    y: Point,
    v: Point,
}

fn clamp_to_ball(p: Point, eta: f64) -> Point {
    let n = p.norm();
    if n > eta {
        p * (eta / n)
    } else {
        p
    }
}

fn lipschitz_pairs(
    dim: usize,
    grid: &TimeGrid,
    eta: f64,
    n_pairs: usize,
    rng_seed: u64,
) -> Vec<LipschitzPair> {
    let mut rng = crate::sampling::rng(rng_seed);
    (0..n_pairs)
        .map(|i| {
            let t = random_node(&mut rng, grid);
            let x = in_ball(&mut rng, dim, eta);
            let u = in_ball(&mut rng, dim, eta);
            let (y, v) = if i % 2 == 0 {
                (in_ball(&mut rng, dim, eta), in_ball(&mut rng, dim, eta))
            } else {
                // nearby partner to resolve local slopes
                let scale = eta * 10f64.powi(-(1 + (i / 2 % 4) as i32));
                let y = clamp_to_ball(&x + gaussian(&mut rng, dim) * scale, eta);
                let v = clamp_to_ball(&u + gaussian(&mut rng, dim) * scale, eta);
                (y, v)
            };
            LipschitzPair { t, x, u, y, v }
        })
        .collect()
}

/// Empirical lower estimate of `k_η`: the largest
/// `‖f(t,x,u) - f(t,y,v)‖ / (‖x-y‖ + ‖u-v‖)` over pairs in the closed η-ball.
pub fn audit_lipschitz(
    f: &Perturbation,
    grid: &TimeGrid,
    eta: f64,
    n_pairs: usize,
    rng_seed: u64,
) -> f64 {
    lipschitz_pairs(f.dim(), grid, eta, n_pairs, rng_seed)
        .iter()
        .filter_map(|p| {
            let den = (&p.x - &p.y).norm() + (&p.u - &p.v).norm();
            (den > 0.0).then(|| {
                let num = (f.evaluate_unchecked(p.t, &p.x, &p.u)
                    - f.evaluate_unchecked(p.t, &p.y, &p.v))
                .norm();
                num / den
            })
        })
        .fold(0.0, f64::max)
}

/// Empirical Lipschitz constant of the lift in the sum norm on the product,
/// over the same pairs [`audit_lipschitz`] draws for the source.
pub fn audit_lipschitz_lifted(
    g: &LiftedPerturbation,
    grid: &TimeGrid,
    eta: f64,
    n_pairs: usize,
    rng_seed: u64,
) -> f64 {
    let d = g.source().dim();
    let stack = |u: &Point, x: &Point| {
        let mut s = Point::zeros(2 * d);
        s.rows_mut(0, d).copy_from(u);
        s.rows_mut(d, d).copy_from(x);
        s
    };
    let sum_norm = |p: &Point| p.rows(0, d).norm() + p.rows(d, d).norm();
    lipschitz_pairs(d, grid, eta, n_pairs, rng_seed)
        .iter()
        .filter_map(|p| {
            let a = stack(&p.u, &p.x);
            let b = stack(&p.v, &p.y);
            let den = sum_norm(&(&a - &b));
            (den > 0.0).then(|| {
                let diff = g.evaluate_unchecked(p.t, &a) - g.evaluate_unchecked(p.t, &b);
                sum_norm(&diff) / den
            })
        })
        .fold(0.0, f64::max)
}
