use nalgebra::DVector;

use crate::dynamics::{lift_perturbation, StateForcing};
use crate::error::{GeometryError, SolverError};
use crate::geometry::{MovingSet, Point, FEASIBILITY_TOL};

use super::{FirstOrderScenario, Quadrature, Scenario, SecondOrderScenario, Trajectory};

fn step_error(step: usize, e: GeometryError) -> SolverError {
    match e {
        GeometryError::NonUniqueProjection {
            distance,
            prox_radius,
        } => SolverError::NonUniqueProjection {
            step,
            distance,
            prox_radius,
        },
        other => SolverError::Geometry(other),
    }
}

fn check_initial(set: &MovingSet, p: &Point) -> Result<(), SolverError> {
    let distance = set.distance(0.0, p)?;
    if distance > FEASIBILITY_TOL {
        return Err(SolverError::InfeasibleInitialState { distance });
    }
    Ok(())
}

/// Catching-up scheme `X_{i+1} = P_{C(t_{i+1})}(X_i - Q_i)` with `Q_i` the
/// quadrature of `∫ g(s, X_i) ds` over the step.
pub fn catching_up_first_order(
    sc: &FirstOrderScenario,
    quadrature: Quadrature,
) -> Result<Trajectory, SolverError> {
    check_initial(&sc.set, &sc.initial)?;
    let grid = sc.grid;
    let h = grid.step_size();
    let mut states = Vec::with_capacity(grid.node_count());
    states.push(sc.initial.clone());
    for i in 0..grid.steps() {
        let current = &states[i];
        let t_eval = quadrature.eval_time(grid.node(i), h);
        let increment = sc.forcing.evaluate_unchecked(t_eval, current) * h;
        let next = sc
            .set
            .project(grid.node(i + 1), &(current - increment))
            .map_err(|e| step_error(i, e))?;
        states.push(next);
    }
    Trajectory::first_order(grid, states)
}

/// Direct second-order scheme:
/// `u_{i+1} = P_{K(t_{i+1})}(u_i - Q_i)` with `Q_i` the quadrature of
/// `∫ f(s, x_i, u_i) ds`, and `x_{i+1} = x_i + h u_i`.
pub fn catching_up_second_order(
    sc: &SecondOrderScenario,
    quadrature: Quadrature,
) -> Result<Trajectory, SolverError> {
    check_initial(&sc.set, &sc.u0)?;
    let grid = sc.grid;
    let h = grid.step_size();
    let mut velocities = Vec::with_capacity(grid.node_count());
    let mut positions = Vec::with_capacity(grid.node_count());
    velocities.push(sc.u0.clone());
    positions.push(sc.x0.clone());
    for i in 0..grid.steps() {
        let (u, x) = (&velocities[i], &positions[i]);
        let t_eval = quadrature.eval_time(grid.node(i), h);
        let increment = sc.perturbation.evaluate_unchecked(t_eval, x, u) * h;
        let next_u = sc
            .set
            .project(grid.node(i + 1), &(u - increment))
            .map_err(|e| step_error(i, e))?;
        let next_x = x + u * h;
        velocities.push(next_u);
        positions.push(next_x);
    }
    Trajectory::second_order(grid, velocities, positions)
}

/// Rewrites the second-order problem as a first-order sweeping process on
/// `C(t) = K(t) × ℝ^d` with the lifted perturbation and `X₀ = (u₀, x₀)`.
pub fn reduce_second_to_first(sc: &SecondOrderScenario) -> FirstOrderScenario {
    let d = sc.x0.len();
    let mut initial = DVector::zeros(2 * d);
    initial.rows_mut(0, d).copy_from(&sc.u0);
    initial.rows_mut(d, d).copy_from(&sc.x0);
    let set = MovingSet::product(sc.set.clone(), d)
        .with_horizon(sc.grid.horizon())
        .expect("block already validated over the horizon");
    FirstOrderScenario {
        set,
        forcing: StateForcing::Lifted(lift_perturbation(&sc.perturbation)),
        initial,
        grid: sc.grid,
        quadrature: sc.quadrature,
    }
}

/// Solves with the scenario's own quadrature.
pub fn solve(sc: &Scenario) -> Result<Trajectory, SolverError> {
    match sc {
        Scenario::First(s) => catching_up_first_order(s, s.quadrature),
        Scenario::Second(s) => catching_up_second_order(s, s.quadrature),
    }
}

/// Splits a first-order trajectory on the doubled state into
/// `(velocity block, position block)` node lists.
pub fn split_reduced(tr: &Trajectory, d: usize) -> (Vec<Point>, Vec<Point>) {
    tr.states()
        .iter()
        .map(|s| (s.rows(0, d).into_owned(), s.rows(d, d).into_owned()))
        .unzip()
}

/// Stacks a second-order trajectory into the reduced state `X_i = (u_i, x_i)`.
/// Returns `None` for first-order input.
pub fn stack_reduced(tr: &Trajectory) -> Option<Trajectory> {
    let positions = tr.positions()?;
    let states = tr
        .states()
        .iter()
        .zip(positions)
        .map(|(u, x)| {
            let d = u.len();
            let mut s = DVector::zeros(2 * d);
            s.rows_mut(0, d).copy_from(u);
            s.rows_mut(d, d).copy_from(x);
            s
        })
        .collect();
    Trajectory::first_order(*tr.grid(), states).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Perturbation, PerturbationKind};
    use crate::grid::TimeGrid;
    use crate::path::{ScalarPath, VectorPath};
    use nalgebra::{dvector, DMatrix};

    fn half_line_sweep() -> MovingSet {
        // K(t) = [t, ∞)
        MovingSet::half_space(
            vec![1.0],
            ScalarPath::Linear {
                slope: 1.0,
                offset: 0.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_convex_set_keeps_state() {
        let set = MovingSet::ball(VectorPath::constant(&[0.0, 0.0]), 1.0).unwrap();
        let sc = FirstOrderScenario::new(
            set,
            StateForcing::Direct(Perturbation::zero(2)),
            dvector![0.3, -0.4],
            TimeGrid::new(1.0, 25).unwrap(),
        )
        .unwrap();
        let tr = catching_up_first_order(&sc, Quadrature::Left).unwrap();
        assert!(tr.states().iter().all(|s| *s == dvector![0.3, -0.4]));
    }

    #[test]
    fn half_line_sweep_is_exact() {
        for n in [1, 3, 10, 77] {
            let grid = TimeGrid::new(1.0, n).unwrap();
            let sc = FirstOrderScenario::new(
                half_line_sweep(),
                StateForcing::Direct(Perturbation::zero(1)),
                dvector![0.0],
                grid,
            )
            .unwrap();
            let tr = catching_up_first_order(&sc, Quadrature::Left).unwrap();
            for (i, s) in tr.states().iter().enumerate() {
                assert_eq!(s[0], grid.node(i));
            }
            // a 100× finer grid agrees at every shared node
            let fine = FirstOrderScenario {
                grid: grid.refined(100),
                ..sc.clone()
            };
            let fine_tr = catching_up_first_order(&fine, Quadrature::Left).unwrap();
            for i in 0..=n {
                assert_eq!(fine_tr.states()[100 * i], tr.states()[i]);
            }
        }
    }

    #[test]
    fn free_set_reproduces_explicit_euler() {
        let f = Perturbation::new(
            PerturbationKind::Affine {
                position: DMatrix::identity(1, 1),
                velocity: DMatrix::zeros(1, 1),
                bias: DVector::zeros(1),
                time_coefficient: None,
            },
            1,
            ScalarPath::Constant(1.0),
        )
        .unwrap();
        let grid = TimeGrid::new(1.0, 20).unwrap();
        let h = grid.step_size();
        let sc = FirstOrderScenario::new(
            MovingSet::whole_space(1),
            StateForcing::Direct(f),
            dvector![2.0],
            grid,
        )
        .unwrap();
        let tr = catching_up_first_order(&sc, Quadrature::Left).unwrap();
        for (i, s) in tr.states().iter().enumerate() {
            let exact = (1.0 - h).powi(i as i32) * 2.0;
            assert!((s[0] - exact).abs() < 1e-14 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn second_order_constant_set() {
        let set = MovingSet::ball(VectorPath::constant(&[0.0, 0.0]), 1.0).unwrap();
        let grid = TimeGrid::new(2.0, 10).unwrap();
        let sc = SecondOrderScenario::new(
            set,
            Perturbation::zero(2),
            dvector![1.0, 1.0],
            dvector![0.5, 0.0],
            grid,
        )
        .unwrap();
        let tr = catching_up_second_order(&sc, Quadrature::Left).unwrap();
        for (i, (u, x)) in tr.states().iter().zip(tr.positions().unwrap()).enumerate() {
            assert_eq!(*u, dvector![0.5, 0.0]);
            let t = grid.node(i);
            assert!((x - dvector![1.0 + 0.5 * t, 1.0]).norm() < 1e-14);
        }
    }

    #[test]
    fn second_order_half_line_closed_form() {
        let horizon = 1.5;
        for n in [4, 30, 200] {
            let grid = TimeGrid::new(horizon, n).unwrap();
            let h = grid.step_size();
            let sc = SecondOrderScenario::new(
                half_line_sweep(),
                Perturbation::zero(1),
                dvector![0.0],
                dvector![0.0],
                grid,
            )
            .unwrap();
            let tr = catching_up_second_order(&sc, Quadrature::Left).unwrap();
            let x_end = tr.positions().unwrap()[n][0];
            let discrete_error = horizon * horizon / 2.0 - x_end;
            assert!((discrete_error - horizon * h / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reduction_matches_direct_solve_exactly() {
        let set = MovingSet::ball_complement(
            VectorPath(vec![
                ScalarPath::Linear {
                    slope: 0.8,
                    offset: -1.6,
                },
                ScalarPath::Constant(0.0),
            ]),
            1.0,
        )
        .unwrap();
        let f = Perturbation::new(
            PerturbationKind::Affine {
                position: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
                velocity: DMatrix::identity(2, 2) * 0.1,
                bias: dvector![0.0, 0.2],
                time_coefficient: None,
            },
            2,
            ScalarPath::Constant(1.0),
        )
        .unwrap();
        let sc = SecondOrderScenario::new(
            set,
            f,
            dvector![0.0, 0.0],
            dvector![0.0, 0.2],
            TimeGrid::new(1.0, 50).unwrap(),
        )
        .unwrap();
        let reduced = reduce_second_to_first(&sc);
        assert_eq!(reduced.dim(), 4);
        assert_eq!(reduced.set.prox_radius(), 1.0);
        let direct = catching_up_second_order(&sc, Quadrature::Left).unwrap();
        let lifted = catching_up_first_order(&reduced, Quadrature::Left).unwrap();
        let (u, x) = split_reduced(&lifted, 2);
        assert_eq!(u, direct.states());
        assert_eq!(x, direct.positions().unwrap());
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let sc = FirstOrderScenario {
            set: half_line_sweep(),
            forcing: StateForcing::Direct(Perturbation::zero(1)),
            initial: dvector![-0.001],
            grid: TimeGrid::new(1.0, 4).unwrap(),
            quadrature: Quadrature::Left,
        };
        assert!(matches!(
            catching_up_first_order(&sc, Quadrature::Left),
            Err(SolverError::InfeasibleInitialState { .. })
        ));
        assert!(matches!(
            FirstOrderScenario::new(
                sc.set.clone(),
                sc.forcing.clone(),
                dvector![-0.001],
                sc.grid
            ),
            Err(SolverError::InfeasibleInitialState { .. })
        ));
    }

    #[test]
    fn leaving_the_tube_reports_the_step() {
        // hole of radius 1 sweeping through the origin at speed 10; by the
        // second step the pre-projection point sits at the centre
        let set = MovingSet::ball_complement(
            VectorPath(vec![
                ScalarPath::Linear {
                    slope: 10.0,
                    offset: -1.0,
                },
                ScalarPath::Constant(0.0),
            ]),
            1.0,
        )
        .unwrap();
        let sc = FirstOrderScenario::new(
            set,
            StateForcing::Direct(Perturbation::zero(2)),
            dvector![0.0, 0.0],
            TimeGrid::new(1.0, 10).unwrap(),
        )
        .unwrap();
        match catching_up_first_order(&sc, Quadrature::Left) {
            Err(SolverError::NonUniqueProjection { step, distance, .. }) => {
                assert_eq!(step, 0);
                assert_eq!(distance, 1.0);
            }
            other => panic!("expected tube violation, got {other:?}"),
        }
    }
}
