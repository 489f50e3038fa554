use nalgebra::{DMatrix, DVector};

use crate::geometry::Point;
use crate::path::ScalarPath;

use super::DynamicsError;

/// Builtin scalar nonlinearities applied coordinate by coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMap {
    Zero,
    Identity,
    Sin,
    Tanh,
    Square,
    Cube,
}

impl ScalarMap {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            ScalarMap::Zero => 0.0,
            ScalarMap::Identity => v,
            ScalarMap::Sin => v.sin(),
            ScalarMap::Tanh => v.tanh(),
            ScalarMap::Square => v * v,
            ScalarMap::Cube => v * v * v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalarMap::Zero => "zero",
            ScalarMap::Identity => "identity",
            ScalarMap::Sin => "sin",
            ScalarMap::Tanh => "tanh",
            ScalarMap::Square => "square",
            ScalarMap::Cube => "cube",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ScalarMap::Zero,
            ScalarMap::Identity,
            ScalarMap::Sin,
            ScalarMap::Tanh,
            ScalarMap::Square,
            ScalarMap::Cube,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationKind {
    Zero,
    /// `A x + B u + φ(t) b`, with `φ ≡ 1` when no time coefficient is given.
    Affine {
        position: DMatrix<f64>,
        velocity: DMatrix<f64>,
        bias: DVector<f64>,
        time_coefficient: Option<ScalarPath>,
    },
    /// `sin(ω t + φ) w`.
    TrigonometricForcing {
        direction: DVector<f64>,
        frequency: f64,
        phase: f64,
    },
    /// `φ(x_k) + ψ(u_k)` in every coordinate.
    Componentwise {
        position: ScalarMap,
        velocity: ScalarMap,
    },
}

/// Single-valued forcing `f(t, x, u)` on `ℝ^d × ℝ^d` with a declared growth envelope `c(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    kind: PerturbationKind,
    dim: usize,
    growth: ScalarPath,
}

impl Perturbation {
    pub fn new(
        kind: PerturbationKind,
        dim: usize,
        growth: ScalarPath,
    ) -> Result<Self, DynamicsError> {
        let mismatch =
            |expected: usize, found: usize| DynamicsError::DimensionMismatch { expected, found };
        match &kind {
            PerturbationKind::Affine {
                position,
                velocity,
                bias,
                ..
            } => {
                for m in [position, velocity] {
                    if m.nrows() != dim {
                        return Err(mismatch(dim, m.nrows()));
                    }
                    if m.ncols() != dim {
                        return Err(mismatch(dim, m.ncols()));
                    }
                }
                if bias.len() != dim {
                    return Err(mismatch(dim, bias.len()));
                }
            }
            PerturbationKind::TrigonometricForcing { direction, .. } => {
                if direction.len() != dim {
                    return Err(mismatch(dim, direction.len()));
                }
            }
            PerturbationKind::Zero | PerturbationKind::Componentwise { .. } => {}
        }
        Ok(Perturbation { kind, dim, growth })
    }

    pub fn zero(dim: usize) -> Self {
        Perturbation {
            kind: PerturbationKind::Zero,
            dim,
            growth: ScalarPath::Constant(0.0),
        }
    }

    pub fn kind(&self) -> &PerturbationKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn growth_path(&self) -> &ScalarPath {
        &self.growth
    }

    /// `c(t)`.
    pub fn growth(&self, t: f64) -> f64 {
        self.growth.value(t)
    }

    pub fn with_growth(mut self, growth: ScalarPath) -> Self {
        self.growth = growth;
        self
    }

    pub fn evaluate(&self, t: f64, x: &Point, u: &Point) -> Result<Point, DynamicsError> {
        for p in [x, u] {
            if p.len() != self.dim {
                return Err(DynamicsError::DimensionMismatch {
                    expected: self.dim,
                    found: p.len(),
                });
            }
        }
        Ok(self.evaluate_unchecked(t, x, u))
    }

    pub(crate) fn evaluate_unchecked(&self, t: f64, x: &Point, u: &Point) -> Point {
        match &self.kind {
            PerturbationKind::Zero => DVector::zeros(self.dim),
            PerturbationKind::Affine {
                position,
                velocity,
                bias,
                time_coefficient,
            } => {
                let phi = time_coefficient.map_or(1.0, |p| p.value(t));
                position * x + velocity * u + bias * phi
            }
            PerturbationKind::TrigonometricForcing {
                direction,
                frequency,
                phase,
            } => direction * (frequency * t + phase).sin(),
            PerturbationKind::Componentwise { position, velocity } => DVector::from_iterator(
                self.dim,
                x.iter()
                    .zip(u.iter())
                    .map(|(&xk, &uk)| position.apply(xk) + velocity.apply(uk)),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_kind_is_zero() {
        let f = Perturbation::zero(3);
        let p = dvector![1.0, 2.0, 3.0];
        assert_eq!(f.evaluate(0.4, &p, &p).unwrap(), DVector::zeros(3));
    }

    #[test]
    fn affine_identity_returns_position() {
        let f = Perturbation::new(
            PerturbationKind::Affine {
                position: DMatrix::identity(2, 2),
                velocity: DMatrix::zeros(2, 2),
                bias: DVector::zeros(2),
                time_coefficient: None,
            },
            2,
            ScalarPath::Constant(1.0),
        )
        .unwrap();
        let out = f
            .evaluate(0.0, &dvector![2.0, 3.0], &dvector![-5.0, 9.0])
            .unwrap();
        assert_eq!(out, dvector![2.0, 3.0]);
    }

    #[test]
    fn trigonometric_forcing_peaks_at_quarter_period() {
        let f = Perturbation::new(
            PerturbationKind::TrigonometricForcing {
                direction: dvector![1.0, 0.0],
                frequency: 1.0,
                phase: 0.0,
            },
            2,
            ScalarPath::Constant(1.0),
        )
        .unwrap();
        let z = DVector::zeros(2);
        assert_eq!(f.evaluate(FRAC_PI_2, &z, &z).unwrap(), dvector![1.0, 0.0]);
    }

    #[test]
    fn time_coefficient_scales_bias() {
        let f = Perturbation::new(
            PerturbationKind::Affine {
                position: DMatrix::zeros(1, 1),
                velocity: DMatrix::zeros(1, 1),
                bias: dvector![2.0],
                time_coefficient: Some(ScalarPath::Linear {
                    slope: 3.0,
                    offset: 0.0,
                }),
            },
            1,
            ScalarPath::Constant(6.0),
        )
        .unwrap();
        let z = DVector::zeros(1);
        assert_eq!(f.evaluate(0.5, &z, &z).unwrap()[0], 3.0);
    }

    #[test]
    fn componentwise_adds_both_maps() {
        let f = Perturbation::new(
            PerturbationKind::Componentwise {
                position: ScalarMap::Square,
                velocity: ScalarMap::Identity,
            },
            2,
            ScalarPath::Constant(1.0),
        )
        .unwrap();
        let out = f
            .evaluate(0.0, &dvector![3.0, -1.0], &dvector![0.5, 2.0])
            .unwrap();
        assert_eq!(out, dvector![9.5, 3.0]);
    }

    #[test]
    fn dimension_checks() {
        assert!(Perturbation::new(
            PerturbationKind::Affine {
                position: DMatrix::zeros(2, 3),
                velocity: DMatrix::zeros(2, 2),
                bias: DVector::zeros(2),
                time_coefficient: None,
            },
            2,
            ScalarPath::Constant(0.0),
        )
        .is_err());
        let f = Perturbation::zero(2);
        assert_eq!(
            f.evaluate(0.0, &dvector![1.0], &dvector![1.0, 2.0]),
            Err(DynamicsError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn scalar_map_names_round_trip() {
        for m in [
            ScalarMap::Zero,
            ScalarMap::Identity,
            ScalarMap::Sin,
            ScalarMap::Tanh,
            ScalarMap::Square,
            ScalarMap::Cube,
        ] {
            assert_eq!(ScalarMap::from_name(m.name()), Some(m));
        }
        assert_eq!(ScalarMap::from_name("exp"), None);
    }
}
