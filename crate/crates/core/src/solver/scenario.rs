use crate::dynamics::{Perturbation, StateForcing};
use crate::error::{GeometryError, SolverError};
use crate::geometry::{MovingSet, Point, FEASIBILITY_TOL};
use crate::grid::TimeGrid;

/// How the per-step integral of the perturbation is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// `h · f(t_i, ...)`
    #[default]
    Left,
    /// `h · f(t_i + h/2, ...)`
    Midpoint,
}

impl Quadrature {
    pub fn name(self) -> &'static str {
        match self {
            Quadrature::Left => "left",
            Quadrature::Midpoint => "midpoint",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "left" => Some(Quadrature::Left),
            "midpoint" => Some(Quadrature::Midpoint),
            _ => None,
        }
    }

    pub(crate) fn eval_time(self, t: f64, h: f64) -> f64 {
        match self {
            Quadrature::Left => t,
            Quadrature::Midpoint => t + 0.5 * h,
        }
    }
}

fn mismatch(expected: usize, found: usize) -> SolverError {
    SolverError::Geometry(GeometryError::DimensionMismatch { expected, found })
}

fn check_feasible(set: &MovingSet, p: &Point) -> Result<(), SolverError> {
    let distance = set.distance(0.0, p)?;
    if distance > FEASIBILITY_TOL {
        return Err(SolverError::InfeasibleInitialState { distance });
    }
    Ok(())
}

/// `-Ẋ ∈ N_{C(t)}(X) + g(t, X)`, `X(0) = X₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderScenario {
    pub set: MovingSet,
    pub forcing: StateForcing,
    pub initial: Point,
    pub grid: TimeGrid,
    pub quadrature: Quadrature,
}

impl FirstOrderScenario {
    pub fn new(
        set: MovingSet,
        forcing: StateForcing,
        initial: Point,
        grid: TimeGrid,
    ) -> Result<Self, SolverError> {
        let set = set.with_horizon(grid.horizon())?;
        if forcing.dim() != set.dim() {
            return Err(mismatch(set.dim(), forcing.dim()));
        }
        check_feasible(&set, &initial)?;
        Ok(FirstOrderScenario {
            set,
            forcing,
            initial,
            grid,
            quadrature: Quadrature::Left,
        })
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

/// `-ẍ ∈ N_{K(t)}(ẋ) + f(t, x, ẋ)`, `ẋ ∈ K(t)`, `x(0) = x₀`, `ẋ(0) = u₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderScenario {
    pub set: MovingSet,
    pub perturbation: Perturbation,
    pub x0: Point,
    pub u0: Point,
    pub grid: TimeGrid,
    pub quadrature: Quadrature,
}

impl SecondOrderScenario {
    pub fn new(
        set: MovingSet,
        perturbation: Perturbation,
        x0: Point,
        u0: Point,
        grid: TimeGrid,
    ) -> Result<Self, SolverError> {
        let set = set.with_horizon(grid.horizon())?;
        let d = set.dim();
        for found in [perturbation.dim(), x0.len()] {
            if found != d {
                return Err(mismatch(d, found));
            }
        }
        check_feasible(&set, &u0)?;
        Ok(SecondOrderScenario {
            set,
            perturbation,
            x0,
            u0,
            grid,
            quadrature: Quadrature::Left,
        })
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    First(FirstOrderScenario),
    Second(SecondOrderScenario),
}

impl Scenario {
    pub fn order(&self) -> u8 {
        match self {
            Scenario::First(_) => 1,
            Scenario::Second(_) => 2,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        match self {
            Scenario::First(sc) => sc.grid,
            Scenario::Second(sc) => sc.grid,
        }
    }

    pub fn quadrature(&self) -> Quadrature {
        match self {
            Scenario::First(sc) => sc.quadrature,
            Scenario::Second(sc) => sc.quadrature,
        }
    }

    pub fn set(&self) -> &MovingSet {
        match self {
            Scenario::First(sc) => &sc.set,
            Scenario::Second(sc) => &sc.set,
        }
    }

    /// Same scenario on a grid with `steps` steps over the same horizon.
    pub fn with_steps(&self, steps: usize) -> Self {
        let grid =
            TimeGrid::new(self.grid().horizon(), steps.max(1)).expect("horizon already validated");
        let mut out = self.clone();
        match &mut out {
            Scenario::First(sc) => sc.grid = grid,
            Scenario::Second(sc) => sc.grid = grid,
        }
        out
    }

    pub fn with_quadrature(&self, quadrature: Quadrature) -> Self {
        match self.clone() {
            Scenario::First(sc) => Scenario::First(sc.with_quadrature(quadrature)),
            Scenario::Second(sc) => Scenario::Second(sc.with_quadrature(quadrature)),
        }
    }

    pub fn refined(&self, factor: usize) -> Self {
        self.with_steps(self.grid().steps() * factor)
    }
}

impl From<FirstOrderScenario> for Scenario {
    fn from(sc: FirstOrderScenario) -> Self {
        Scenario::First(sc)
    }
}

impl From<SecondOrderScenario> for Scenario {
    fn from(sc: SecondOrderScenario) -> Self {
        Scenario::Second(sc)
    }
}
