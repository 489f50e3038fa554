//! Closed-form scalar and vector motion paths.
//!
//! Every path in this family has an exactly computable derivative, and its
//! total variation is available in closed form (scalar) or by arc length
//! (vector). Set moduli are assembled from these.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;

use crate::quadrature::adaptive_simpson;

/// A scalar function of time from the builtin symbolic family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarPath {
    Constant(f64),
    /// `slope * t + offset`
    Linear {
        slope: f64,
        offset: f64,
    },
    /// `amplitude * sin(frequency * t + phase) + offset`
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
}

impl ScalarPath {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarPath::Constant(c) => c,
            ScalarPath::Linear { slope, offset } => slope * t + offset,
            ScalarPath::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => amplitude * (frequency * t + phase).sin() + offset,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            ScalarPath::Constant(_) => 0.0,
            ScalarPath::Linear { slope, .. } => slope,
            ScalarPath::Sinusoid {
                amplitude,
                frequency,
                phase,
                ..
            } => amplitude * frequency * (frequency * t + phase).cos(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            ScalarPath::Constant(_) => true,
            ScalarPath::Linear { slope, .. } => slope == 0.0,
            ScalarPath::Sinusoid {
                amplitude,
                frequency,
                ..
            } => amplitude == 0.0 || frequency == 0.0,
        }
    }

    /// Total variation `∫_s^t |path'|` for `s <= t` (the arguments are ordered internally).
    pub fn total_variation(&self, s: f64, t: f64) -> f64 {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        match *self {
            ScalarPath::Constant(_) => 0.0,
            ScalarPath::Linear { slope, .. } => slope.abs() * (t - s),
            ScalarPath::Sinusoid {
                amplitude,
                frequency,
                phase,
                ..
            } => {
                let lo = frequency * s + phase;
                let hi = frequency * t + phase;
                amplitude.abs() * (abs_cos_primitive(hi) - abs_cos_primitive(lo)).abs()
            }
        }
    }

    /// Smallest and largest values over `[s, t]`.
    pub fn range(&self, s: f64, t: f64) -> (f64, f64) {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        let (a, b) = (self.value(s), self.value(t));
        let (mut lo, mut hi) = (a.min(b), a.max(b));
        if let ScalarPath::Sinusoid {
            amplitude,
            frequency,
            phase,
            offset,
        } = *self
        {
            if frequency != 0.0 {
                let (t0, t1) = {
                    let x = frequency * s + phase;
                    let y = frequency * t + phase;
                    (x.min(y), x.max(y))
                };
                // sin attains ±1 at π/2 + kπ
                let first = ((t0 - FRAC_PI_2) / PI).ceil() as i64;
                let last = ((t1 - FRAC_PI_2) / PI).floor() as i64;
                if first <= last {
                    for k in first..=last.min(first + 1) {
                        let v = amplitude * (FRAC_PI_2 + k as f64 * PI).sin() + offset;
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
        }
        (lo, hi)
    }
}

/// Nondecreasing primitive of `|cos|`, anchored at zero for `θ = -π/2`.
fn abs_cos_primitive(theta: f64) -> f64 {
    let k = ((theta + FRAC_PI_2) / PI).floor();
    let sign = if (k as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    2.0 * k + 1.0 + sign * theta.sin()
}

/// A vector-valued path, one scalar path per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPath(pub Vec<ScalarPath>);

impl VectorPath {
    pub fn constant(v: &[f64]) -> Self {
        VectorPath(v.iter().map(|&c| ScalarPath::Constant(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn value(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|p| p.value(t)))
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|p| p.derivative(t)))
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.0
            .iter()
            .map(|p| p.derivative(t).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean arc length between `s` and `t`.
    ///
    /// Exact when at most one coordinate moves or all motion is linear;
    /// otherwise adaptive quadrature of the speed to 1e-14.
    pub fn arc_length(&self, s: f64, t: f64) -> f64 {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        let moving: Vec<&ScalarPath> = self.0.iter().filter(|p| !p.is_constant()).collect();
        match moving.as_slice() {
            [] => 0.0,
            [single] => single.total_variation(s, t),
            many if many.iter().all(|p| matches!(p, ScalarPath::Linear { .. })) => {
                let speed = many
                    .iter()
                    .map(|p| p.derivative(0.0).powi(2))
                    .sum::<f64>()
                    .sqrt();
                speed * (t - s)
            }
            _ => adaptive_simpson(&|x| self.speed(x), s, t, 1e-14),
        }
    }
}
