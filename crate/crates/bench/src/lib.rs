//! Workloads shared by the criterion benchmarks.

use sweep_core::analysis::residual_normal_cone;
use sweep_core::benchmarks;
use sweep_core::geometry::probe_points;
use sweep_core::solver::{
    catching_up_first_order, catching_up_second_order, reduce_second_to_first,
};
use sweep_core::{MovingSet, Point, SecondOrderScenario, Trajectory};

pub const SOLVE_SIZES: [usize; 3] = [100, 1_000, 10_000];

pub fn second_order_case(name: &str, steps: usize) -> SecondOrderScenario {
    match name {
        "moving_ball" => benchmarks::moving_ball(steps),
        "ball_complement" => benchmarks::ball_complement(steps),
        "affine_sinusoidal" => benchmarks::affine_sinusoidal(steps),
        other => panic!("no workload named {other}"),
    }
}

pub fn solve_direct(sc: &SecondOrderScenario) -> Trajectory {
    catching_up_second_order(sc, sc.quadrature).expect("builtin workloads solve")
}

pub fn solve_reduced(sc: &SecondOrderScenario) -> Trajectory {
    let reduced = reduce_second_to_first(sc);
    catching_up_first_order(&reduced, reduced.quadrature).expect("builtin workloads solve")
}

pub fn residual_max(sc: &SecondOrderScenario, tr: &Trajectory) -> f64 {
    residual_normal_cone(tr, sc, 1e-9)
        .expect("trajectory matches scenario")
        .max_violation
}

/// One set per kind, each with a fixed batch of nearby query points.
pub fn projection_batches(count: usize) -> Vec<(MovingSet, Vec<Point>)> {
    benchmarks::canonical_sets()
        .into_iter()
        .map(|set| {
            let pts = probe_points(&set, 0.5, count, 3);
            (set, pts)
        })
        .collect()
}

pub fn project_all(set: &MovingSet, points: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| set.project(0.5, p).expect("valid query").sum())
        .sum()
}
