use crate::error::{GeometryError, SolverError};
use crate::geometry::Point;
use crate::grid::TimeGrid;

/// Node values of a discrete solution.
///
/// For first-order solves `states` holds `X_i`. For second-order solves it
/// holds the velocities `u_i` and `positions` holds `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<Point>,
    positions: Option<Vec<Point>>,
}

impl Trajectory {
    pub fn first_order(grid: TimeGrid, states: Vec<Point>) -> Result<Self, SolverError> {
        check_len(&grid, states.len())?;
        Ok(Trajectory {
            grid,
            states,
            positions: None,
        })
    }

    pub fn second_order(
        grid: TimeGrid,
        velocities: Vec<Point>,
        positions: Vec<Point>,
    ) -> Result<Self, SolverError> {
        check_len(&grid, velocities.len())?;
        check_len(&grid, positions.len())?;
        Ok(Trajectory {
            grid,
            states: velocities,
            positions: Some(positions),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn order(&self) -> u8 {
        if self.positions.is_some() {
            2
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `X_i` for first order, `u_i` for second order.
    pub fn states(&self) -> &[Point] {
        &self.states
    }

    pub fn positions(&self) -> Option<&[Point]> {
        self.positions.as_deref()
    }

    #[cfg(test)]
    pub(crate) fn states_mut(&mut self) -> &mut [Point] {
        &mut self.states
    }

    /// Piecewise-affine interpolation of the state (velocity for second order).
    pub fn interpolate(&self, t: f64) -> Result<Point, GeometryError> {
        interpolate_nodes(&self.grid, &self.states, t)
    }

    /// Piecewise-affine interpolation of the position nodes, if any.
    pub fn interpolate_position(&self, t: f64) -> Result<Option<Point>, GeometryError> {
        self.positions
            .as_ref()
            .map(|xs| interpolate_nodes(&self.grid, xs, t))
            .transpose()
    }
}

fn check_len(grid: &TimeGrid, len: usize) -> Result<(), SolverError> {
    if len != grid.node_count() {
        return Err(SolverError::Incompatible(format!(
            "{len} nodes for a grid with {} nodes",
            grid.node_count()
        )));
    }
    Ok(())
}

fn interpolate_nodes(grid: &TimeGrid, nodes: &[Point], t: f64) -> Result<Point, GeometryError> {
    let horizon = grid.horizon();
    if !(0.0..=horizon).contains(&t) {
        return Err(GeometryError::OutsideHorizon { t, horizon });
    }
    let n = grid.steps();
    let i = ((t / grid.step_size()).floor() as usize).min(n - 1);
    let (t0, t1) = (grid.node(i), grid.node(i + 1));
    if t == t0 {
        return Ok(nodes[i].clone());
    }
    if t == t1 {
        return Ok(nodes[i + 1].clone());
    }
    let lambda = (t - t0) / (t1 - t0);
    Ok(&nodes[i] * (1.0 - lambda) + &nodes[i + 1] * lambda)
}
