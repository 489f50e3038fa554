use serde::Serialize;

use crate::error::SolverError;
use crate::geometry::{prox_sides, MovingSet, Point};
use crate::grid::TimeGrid;
use crate::solver::{FirstOrderScenario, SecondOrderScenario, Trajectory};

/// Margins above this are reported as normal-cone violations.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Default seed for the sampled membership test.
pub const RESIDUAL_SEED: u64 = 0x5eed;

/// Radii, relative to the set's scale, of the neighbourhood explored around each iterate.
const NEIGHBOURHOOD: [f64; 6] = [1e-6, 1e-4, 1e-3, 1e-2, 0.1, 1.0];
const RANDOM_PER_RADIUS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepResidual {
    pub step: usize,
    /// `‖ξ_i‖` with `ξ_i = -(u_{i+1} - u_i)/h - f_i`.
    pub residual_norm: f64,
    /// Largest sampled `⟨ξ̂, z - u_{i+1}⟩ - ‖z - u_{i+1}‖²/(2r)`; zero when `‖ξ_i‖ <= tol`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub steps: Vec<StepResidual>,
    pub max_violation: f64,
    pub flagged_steps: Vec<usize>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.flagged_steps.is_empty()
    }
}

/// Normal-cone membership of the discrete residual at every step of a
/// second-order trajectory, tested through the sampled prox inequality.
pub fn residual_normal_cone(
    traj: &Trajectory,
    sc: &SecondOrderScenario,
    tol: f64,
) -> Result<ResidualReport, SolverError> {
    residual_normal_cone_seeded(traj, sc, tol, RESIDUAL_SEED)
}

pub fn residual_normal_cone_seeded(
    traj: &Trajectory,
    sc: &SecondOrderScenario,
    tol: f64,
    seed: u64,
) -> Result<ResidualReport, SolverError> {
    let positions = traj.positions().ok_or_else(|| {
        SolverError::Incompatible("second-order residual needs position nodes".into())
    })?;
    check_grid(traj, &sc.grid, sc.dim())?;
    let h = sc.grid.step_size();
    let forcing = |i: usize| {
        let t = sc.quadrature.eval_time(sc.grid.node(i), h);
        sc.perturbation
            .evaluate_unchecked(t, &positions[i], &traj.states()[i])
    };
    Ok(residuals(
        &sc.set,
        &sc.grid,
        traj.states(),
        forcing,
        tol,
        seed,
    ))
}

/// First-order counterpart of [`residual_normal_cone`].
pub fn residual_normal_cone_first_order(
    traj: &Trajectory,
    sc: &FirstOrderScenario,
    tol: f64,
    seed: u64,
) -> Result<ResidualReport, SolverError> {
    check_grid(traj, &sc.grid, sc.dim())?;
    let h = sc.grid.step_size();
    let forcing = |i: usize| {
        let t = sc.quadrature.eval_time(sc.grid.node(i), h);
        sc.forcing.evaluate_unchecked(t, &traj.states()[i])
    };
    Ok(residuals(
        &sc.set,
        &sc.grid,
        traj.states(),
        forcing,
        tol,
        seed,
    ))
}

fn check_grid(traj: &Trajectory, grid: &TimeGrid, dim: usize) -> Result<(), SolverError> {
    if traj.grid() != grid {
        return Err(SolverError::Incompatible(format!(
            "trajectory grid {:?} differs from scenario grid {:?}",
            traj.grid(),
            grid
        )));
    }
    if traj.states().iter().any(|s| s.len() != dim) {
        return Err(SolverError::Incompatible(format!(
            "trajectory states are not of dimension {dim}"
        )));
    }
    Ok(())
}

fn residuals<F: Fn(usize) -> Point>(
    set: &MovingSet,
    grid: &TimeGrid,
    states: &[Point],
    forcing: F,
    tol: f64,
    seed: u64,
) -> ResidualReport {
    let mut rng = crate::sampling::rng(seed);
    let h = grid.step_size();
    let r = set.prox_radius();
    let mut steps = Vec::with_capacity(grid.steps());
    for i in 0..grid.steps() {
        let t_next = grid.node(i + 1);
        let next = &states[i + 1];
        let xi = -(next - &states[i]) / h - forcing(i);
        let residual_norm = xi.norm();
        let margin = if residual_norm <= tol {
            0.0
        } else {
            let direction = &xi / residual_norm;
            let scale = set.sampling_scale(t_next);
            let mut worst = f64::NEG_INFINITY;
            let mut consider = |z: Option<Point>| {
                if let Some(z) = z {
                    let (lhs, rhs) = prox_sides(&direction, next, &z, r);
                    worst = worst.max(lhs - rhs);
                }
            };
            for rho in NEIGHBOURHOOD.map(|k| k * scale) {
                consider(
                    set.project_unchecked(t_next, &(next + &direction * rho))
                        .ok(),
                );
                consider(
                    set.project_unchecked(t_next, &(next - &direction * rho))
                        .ok(),
                );
                for _ in 0..RANDOM_PER_RADIUS {
                    consider(set.sample_member_near(t_next, next, rho, &mut rng));
                }
            }
            worst.max(0.0)
        };
        steps.push(StepResidual {
            step: i,
            residual_norm,
            margin,
        });
    }
    let max_violation = steps.iter().map(|s| s.margin).fold(0.0, f64::max);
    let flagged_steps = steps
        .iter()
        .filter(|s| s.margin > RESIDUAL_TOL)
        .map(|s| s.step)
        .collect();
    ResidualReport {
        steps,
        max_violation,
        flagged_steps,
    }
}
