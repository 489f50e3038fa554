use serde::Serialize;

use crate::quadrature::simpson;
use crate::solver::FirstOrderScenario;

use super::Envelope;

/// Grid refinement used for the quadratures in `l`.
pub const BOUND_QUADRATURE_REFINEMENT: usize = 4;

/// The solution bound `l` and the growth envelope it scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub l: f64,
    pub beta: Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsSummary {
    pub l: f64,
    pub beta_at_zero: f64,
}

impl BoundsReport {
    /// `(1 + l) β(t)`, the bound on `‖g(t, X(t))‖`.
    pub fn envelope_f(&self, t: f64) -> f64 {
        (1.0 + self.l) * self.beta.value(t)
    }

    /// `(1 + l) β(t) + |ȧ(t)|`, the bound on `‖Ẋ(t) + g(t, X(t))‖`.
    pub fn envelope_du(&self, t: f64, variation_rate: f64) -> f64 {
        self.envelope_f(t) + variation_rate
    }

    pub fn summary(&self) -> BoundsSummary {
        BoundsSummary {
            l: self.l,
            beta_at_zero: self.beta.value(0.0),
        }
    }
}

/// `l = ‖X₀‖ + exp(2∫β) ∫(2β(1 + ‖X₀‖) + |ȧ|)` over `[0, horizon]`, by composite
/// Simpson on `intervals` subintervals.
pub fn a_priori_constant<B, A>(
    beta: B,
    variation_rate: A,
    initial_norm: f64,
    horizon: f64,
    intervals: usize,
) -> f64
where
    B: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    let beta_integral = simpson(&beta, 0.0, horizon, intervals);
    let drive = simpson(
        |s| 2.0 * beta(s) * (1.0 + initial_norm) + variation_rate(s),
        0.0,
        horizon,
        intervals,
    );
    initial_norm + (2.0 * beta_integral).exp() * drive
}

/// Bound machinery for a first-order scenario, with `β` the forcing's
/// Euclidean growth envelope and `|ȧ|` the set's variation rate.
pub fn a_priori_bound(sc: &FirstOrderScenario) -> BoundsReport {
    let beta = sc.forcing.growth_envelope();
    let intervals = sc.grid.steps() * BOUND_QUADRATURE_REFINEMENT;
    let l = a_priori_constant(
        |t| beta.value(t),
        |t| sc.set.variation_rate(t),
        sc.initial.norm(),
        sc.grid.horizon(),
        intervals,
    );
    BoundsReport { l, beta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pure_motion_gives_total_variation() {
        // β ≡ 0, X₀ = 0, a(t) = t on [0,1]
        let l = a_priori_constant(|_| 0.0, |_| 1.0, 0.0, 1.0, 40);
        assert!((l - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_growth_closed_form() {
        // β ≡ 1, |ȧ| ≡ 0, X₀ = 0, T = 1: l = e² · 2
        let l = a_priori_constant(|_| 1.0, |_| 0.0, 0.0, 1.0, 40);
        let exact = 2.0 * 1f64.exp().powi(2);
        assert!((l - exact).abs() < 1e-6);
        assert!((exact - 14.7781).abs() < 1e-4);
    }

    #[test]
    fn static_data_returns_initial_norm() {
        let l = a_priori_constant(|_| 0.0, |_| 0.0, 5.0, 2.0, 40);
        assert_eq!(l, 5.0);
    }

    #[test]
    fn time_varying_growth_matches_closed_form() {
        // β(t) = t on [0, 1], |ȧ| = 0, X₀ = 0: l = e¹ · 1
        let l = a_priori_constant(|t| t, |_| 0.0, 0.0, 1.0, 8);
        assert!((l - 1f64.exp()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bound_is_monotone(
            beta in 0.0f64..2.0,
            extra in 0.0f64..1.0,
            norm in 0.0f64..5.0,
            more in 0.0f64..5.0,
            rate in 0.0f64..3.0,
        ) {
            let base = a_priori_constant(|_| beta, |_| rate, norm, 1.0, 16);
            let bigger_beta = a_priori_constant(|t| beta + extra * t, |_| rate, norm, 1.0, 16);
            let bigger_norm = a_priori_constant(|_| beta, |_| rate, norm + more, 1.0, 16);
            prop_assert!(bigger_beta >= base);
            prop_assert!(bigger_norm >= base);
            prop_assert!(base >= norm);
        }
    }
}
