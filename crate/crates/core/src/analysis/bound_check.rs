use serde::Serialize;

use crate::dynamics::BoundsReport;
use crate::error::SolverError;
use crate::solver::{FirstOrderScenario, Trajectory};

const RATE_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub passed: bool,
    /// Largest `‖g(t_i, X_i)‖ - slack·(1+l)β(t_i)` over nodes.
    pub worst_force_margin: f64,
    /// Largest `‖(X_{i+1}-X_i)/h + g_i‖ - slack·((1+l)β(t_i) + sup|ȧ|)` over steps.
    pub worst_velocity_margin: f64,
    pub force_margins: Vec<f64>,
    pub velocity_margins: Vec<f64>,
}

/// Upper estimate of `sup |ȧ|` on `[s, t]`: sampled rates, and never below the mean rate.
fn rate_sup(sc: &FirstOrderScenario, s: f64, t: f64) -> f64 {
    let sampled = (0..=RATE_SAMPLES)
        .map(|k| {
            sc.set
                .variation_rate(s + (t - s) * k as f64 / RATE_SAMPLES as f64)
        })
        .fold(0.0, f64::max);
    sampled.max(sc.set.variation_between(s, t) / (t - s))
}

/// Checks the pointwise solution bounds at every node and step of a
/// first-order trajectory, each envelope multiplied by `slack`.
pub fn bound_check(
    traj: &Trajectory,
    bounds: &BoundsReport,
    sc: &FirstOrderScenario,
    slack: f64,
) -> Result<BoundCheck, SolverError> {
    if traj.grid() != &sc.grid || traj.states().iter().any(|s| s.len() != sc.dim()) {
        return Err(SolverError::Incompatible(
            "trajectory was not produced from this scenario".into(),
        ));
    }
    let grid = sc.grid;
    let h = grid.step_size();
    let states = traj.states();
    let force_margins: Vec<f64> = states
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let t = grid.node(i);
            sc.forcing.evaluate_unchecked(t, x).norm() - slack * bounds.envelope_f(t)
        })
        .collect();
    let velocity_margins: Vec<f64> = (0..grid.steps())
        .map(|i| {
            let (t, t_next) = (grid.node(i), grid.node(i + 1));
            let g = sc
                .forcing
                .evaluate_unchecked(sc.quadrature.eval_time(t, h), &states[i]);
            let lhs = ((&states[i + 1] - &states[i]) / h + g).norm();
            lhs - slack * bounds.envelope_du(t, rate_sup(sc, t, t_next))
        })
        .collect();
    let worst_force_margin = force_margins
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_velocity_margin = velocity_margins
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundCheck {
        passed: worst_force_margin <= 0.0 && worst_velocity_margin <= 0.0,
        worst_force_margin,
        worst_velocity_margin,
        force_margins,
        velocity_margins,
    })
}
