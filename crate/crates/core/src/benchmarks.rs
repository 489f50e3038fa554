//! Builtin scenarios used by tests, the command line and the benchmarks.
//!
//! All second-order scenarios run on `[0, 1]` in the plane except the
//! half-line sweep, which is one-dimensional.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{dmatrix, dvector, DMatrix, DVector};

use crate::dynamics::{Perturbation, PerturbationKind, ScalarMap};
use crate::geometry::MovingSet;
use crate::grid::TimeGrid;
use crate::path::{ScalarPath, VectorPath};
use crate::solver::SecondOrderScenario;

pub const HORIZON: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub scenario: SecondOrderScenario,
}

fn sinusoid(amplitude: f64, frequency: f64, offset: f64) -> ScalarPath {
    ScalarPath::Sinusoid {
        amplitude,
        frequency,
        phase: 0.0,
        offset,
    }
}

fn linear(slope: f64, offset: f64) -> ScalarPath {
    ScalarPath::Linear { slope, offset }
}

fn affine(
    position: DMatrix<f64>,
    velocity: DMatrix<f64>,
    bias: DVector<f64>,
    time_coefficient: Option<ScalarPath>,
    growth: f64,
) -> Perturbation {
    let dim = bias.len();
    Perturbation::new(
        PerturbationKind::Affine {
            position,
            velocity,
            bias,
            time_coefficient,
        },
        dim,
        ScalarPath::Constant(growth),
    )
    .expect("builtin dimensions agree")
}

fn scenario(
    set: MovingSet,
    f: Perturbation,
    x0: DVector<f64>,
    u0: DVector<f64>,
    steps: usize,
) -> SecondOrderScenario {
    let grid = TimeGrid::new(HORIZON, steps).expect("steps must be positive");
    SecondOrderScenario::new(set, f, x0, u0, grid).expect("builtin scenarios are valid")
}

/// A fixed box with a linear spring pulling the position back.
pub fn constant_convex_set(steps: usize) -> SecondOrderScenario {
    let set = MovingSet::boxed(
        vec![ScalarPath::Constant(-0.5); 2],
        vec![ScalarPath::Constant(0.5); 2],
    )
    .expect("box");
    let f = affine(
        DMatrix::identity(2, 2) * 4.0,
        DMatrix::zeros(2, 2),
        DVector::zeros(2),
        None,
        4.0,
    );
    scenario(set, f, dvector![0.3, -0.2], dvector![0.5, 0.25], steps)
}

/// An oscillating half-plane with a bounded componentwise forcing.
pub fn moving_half_space(steps: usize) -> SecondOrderScenario {
    let set = MovingSet::half_space(vec![0.6, 0.8], sinusoid(0.5, 3.0, 0.0)).expect("half-space");
    let f = Perturbation::new(
        PerturbationKind::Componentwise {
            position: ScalarMap::Sin,
            velocity: ScalarMap::Tanh,
        },
        2,
        ScalarPath::Constant(1.0),
    )
    .expect("componentwise");
    scenario(set, f, dvector![0.0, 1.0], dvector![0.6, 0.8], steps)
}

/// A translating, oscillating disc with a rotational affine forcing.
pub fn moving_ball(steps: usize) -> SecondOrderScenario {
    let center = VectorPath(vec![sinusoid(0.5, 2.0, 0.0), linear(0.5, 0.0)]);
    let set = MovingSet::ball(center, 1.0).expect("ball");
    let f = affine(
        dmatrix![0.0, -0.5; 0.5, 0.0],
        DMatrix::identity(2, 2) * -0.2,
        dvector![1.5, 0.0],
        None,
        1.5,
    );
    scenario(set, f, dvector![0.0, 0.0], dvector![0.0, 0.0], steps)
}

/// Exterior of a moving unit disc. The forcing pushes the velocity onto the
/// sphere without ever bringing a step near the center.
pub fn ball_complement(steps: usize) -> SecondOrderScenario {
    let center = VectorPath(vec![sinusoid(0.4, 2.0, 0.0), linear(0.3, 0.0)]);
    let set = MovingSet::ball_complement(center, 1.0).expect("ball complement");
    let f = affine(
        DMatrix::zeros(2, 2),
        DMatrix::identity(2, 2) * -0.1,
        dvector![-1.0, 0.5],
        None,
        1.2,
    );
    scenario(set, f, dvector![0.0, 0.0], dvector![-1.2, -0.6], steps)
}

/// A box with oscillating walls and a rotation driven by a sinusoidal forcing term.
pub fn affine_sinusoidal(steps: usize) -> SecondOrderScenario {
    let set = MovingSet::boxed(
        vec![sinusoid(0.2, 2.0, -1.0), ScalarPath::Constant(-0.5)],
        vec![ScalarPath::Constant(1.0), sinusoid(0.3, 4.0, 0.5)],
    )
    .expect("box");
    let f = affine(
        dmatrix![0.0, 1.0; -1.0, 0.0],
        DMatrix::zeros(2, 2),
        dvector![2.0, 2.0] * FRAC_1_SQRT_2,
        Some(sinusoid(2.0, 5.0, 0.0)),
        2.0,
    );
    scenario(set, f, dvector![0.5, -0.5], dvector![0.0, 0.0], steps)
}

/// `K(t) = [t, ∞)` from rest with no forcing: the velocity is `u(t) = t`.
pub fn half_line(steps: usize) -> SecondOrderScenario {
    let set = MovingSet::half_space(vec![1.0], linear(1.0, 0.0)).expect("half-line");
    scenario(
        set,
        Perturbation::zero(1),
        dvector![0.0],
        dvector![0.0],
        steps,
    )
}

/// The second-order suite, with `steps` steps each.
pub fn suite(steps: usize) -> Vec<Benchmark> {
    vec![
        Benchmark {
            name: "constant_convex_set",
            scenario: constant_convex_set(steps),
        },
        Benchmark {
            name: "moving_half_space",
            scenario: moving_half_space(steps),
        },
        Benchmark {
            name: "moving_ball",
            scenario: moving_ball(steps),
        },
        Benchmark {
            name: "ball_complement",
            scenario: ball_complement(steps),
        },
        Benchmark {
            name: "affine_sinusoidal",
            scenario: affine_sinusoidal(steps),
        },
        Benchmark {
            name: "half_line",
            scenario: half_line(steps),
        },
    ]
}

/// One set of every kind, each with motion in every moving parameter.
pub fn canonical_sets() -> Vec<MovingSet> {
    let disc = VectorPath(vec![sinusoid(0.5, 2.0, 0.0), linear(-0.5, 1.0)]);
    let square = MovingSet::boxed(
        vec![sinusoid(0.3, 3.0, -1.0), linear(0.2, -0.5)],
        vec![linear(0.5, 1.0), sinusoid(0.2, 1.0, 0.5)],
    )
    .expect("box");
    vec![
        MovingSet::half_space(vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2], sinusoid(0.7, 4.0, 0.1))
            .expect("half-space"),
        MovingSet::ball(disc.clone(), 1.0).expect("ball"),
        square.clone(),
        MovingSet::translated(
            square.clone(),
            VectorPath(vec![sinusoid(1.0, 1.5, 0.0), linear(0.3, 0.0)]),
        )
        .expect("translated"),
        MovingSet::ball_complement(disc, 1.0).expect("ball complement"),
        MovingSet::product(square, 2),
    ]
}
