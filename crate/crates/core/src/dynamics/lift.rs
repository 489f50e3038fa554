use std::f64::consts::SQRT_2;

use nalgebra::DVector;

use crate::geometry::Point;
use crate::path::ScalarPath;

use super::{DynamicsError, Perturbation};

/// `g(t, (u, x)) = (f(t, x, u), -u)` on the doubled state, velocity block first.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPerturbation {
    source: Perturbation,
}

pub fn lift_perturbation(f: &Perturbation) -> LiftedPerturbation {
    LiftedPerturbation { source: f.clone() }
}

impl LiftedPerturbation {
    pub fn source(&self) -> &Perturbation {
        &self.source
    }

    /// Dimension of the doubled state.
    pub fn dim(&self) -> usize {
        2 * self.source.dim()
    }

    pub fn evaluate(&self, t: f64, state: &Point) -> Result<Point, DynamicsError> {
        if state.len() != self.dim() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.dim(),
                found: state.len(),
            });
        }
        Ok(self.evaluate_unchecked(t, state))
    }

    pub(crate) fn evaluate_unchecked(&self, t: f64, state: &Point) -> Point {
        let d = self.source.dim();
        let u = state.rows(0, d).into_owned();
        let x = state.rows(d, d).into_owned();
        let mut out = DVector::zeros(2 * d);
        out.rows_mut(0, d)
            .copy_from(&self.source.evaluate_unchecked(t, &x, &u));
        out.rows_mut(d, d).copy_from(&(-u));
        out
    }

    /// `β(t) = c(t) + 1`, valid for the sum norm `‖(u, x)‖ = ‖u‖ + ‖x‖` on the product.
    pub fn beta(&self, t: f64) -> f64 {
        self.source.growth(t) + 1.0
    }

    /// `γ_η(t) = k_η(t) + 1` given the source's Lipschitz constant on the η-ball.
    pub fn gamma(&self, k_eta: f64) -> f64 {
        k_eta + 1.0
    }

    /// Growth constant valid for the Euclidean norm on the product, `√2 (c(t) + 1)`.
    pub fn euclidean_beta(&self, t: f64) -> f64 {
        SQRT_2 * self.beta(t)
    }
}

/// `scale · (path(t) + shift)`: a pointwise growth envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub path: ScalarPath,
    pub shift: f64,
    pub scale: f64,
}

impl Envelope {
    pub fn of(path: ScalarPath) -> Self {
        Envelope {
            path,
            shift: 0.0,
            scale: 1.0,
        }
    }

    pub fn constant(value: f64) -> Self {
        Envelope::of(ScalarPath::Constant(value))
    }

    pub fn value(&self, t: f64) -> f64 {
        self.scale * (self.path.value(t) + self.shift)
    }
}

/// The single-valued term of a first-order sweeping process.
#[derive(Debug, Clone, PartialEq)]
pub enum StateForcing {
    /// `g(t, X) = f(t, X, 0)`: a perturbation read as a function of the state alone.
    Direct(Perturbation),
    Lifted(LiftedPerturbation),
}

impl StateForcing {
    pub fn dim(&self) -> usize {
        match self {
            StateForcing::Direct(f) => f.dim(),
            StateForcing::Lifted(g) => g.dim(),
        }
    }

    pub fn evaluate(&self, t: f64, state: &Point) -> Result<Point, DynamicsError> {
        if state.len() != self.dim() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.dim(),
                found: state.len(),
            });
        }
        Ok(self.evaluate_unchecked(t, state))
    }

    pub(crate) fn evaluate_unchecked(&self, t: f64, state: &Point) -> Point {
        match self {
            StateForcing::Direct(f) => f.evaluate_unchecked(t, state, &DVector::zeros(f.dim())),
            StateForcing::Lifted(g) => g.evaluate_unchecked(t, state),
        }
    }

    /// Growth envelope `β` with `‖g(t, X)‖ <= β(t)(1 + ‖X‖)` in the Euclidean norm.
    pub fn growth_envelope(&self) -> Envelope {
        match self {
            StateForcing::Direct(f) => Envelope::of(*f.growth_path()),
            StateForcing::Lifted(g) => Envelope {
                path: *g.source().growth_path(),
                shift: 1.0,
                scale: SQRT_2,
            },
        }
    }
}
