//! Catching-up integration of perturbed sweeping processes, with the audits
//! and residual checks used to verify the discrete solutions.
//!
//! The second-order problem `-ẍ ∈ N_{K(t)}(ẋ) + f(t, x, ẋ)` is solved either
//! directly or through its first-order reduction on `K(t) × ℝ^d`.

pub mod analysis;
pub mod benchmarks;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod path;
pub mod quadrature;
mod sampling;
pub mod solver;

pub use dynamics::{Perturbation, PerturbationKind, StateForcing};
pub use error::{GeometryError, ScenarioError, SolverError};
pub use geometry::{MovingSet, Point};
pub use grid::TimeGrid;
pub use path::{ScalarPath, VectorPath};
pub use solver::{FirstOrderScenario, Quadrature, Scenario, SecondOrderScenario, Trajectory};
