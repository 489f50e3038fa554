//! One-call bundle of the seeded hypothesis audits for a scenario.

use serde::Serialize;

use crate::dynamics::{
    audit_growth, audit_growth_lifted, audit_lipschitz, audit_lipschitz_lifted, GrowthViolation,
    StateForcing,
};
use crate::geometry::{
    probe_points, prox_inequality_audit, variation_audit, MovingSet, ProxViolation,
};
use crate::grid::TimeGrid;
use crate::solver::Scenario;

/// Largest admissible variation ratio.
pub const VARIATION_RATIO_TOL: f64 = 1e-9;

/// Sample counts and radii used by [`audit_scenario`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditConfig {
    pub variation_nodes: usize,
    pub variation_probes: usize,
    pub prox_samples: usize,
    pub prox_times: usize,
    pub growth_samples: usize,
    pub growth_radius: f64,
    pub lipschitz_pairs: usize,
    pub lipschitz_radii: [f64; 2],
    /// Violations beyond this many are counted but not listed.
    pub max_listed: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            variation_nodes: 100,
            variation_probes: 100,
            prox_samples: 10_000,
            prox_times: 3,
            growth_samples: 2_000,
            growth_radius: 10.0,
            lipschitz_pairs: 2_000,
            lipschitz_radii: [1.0, 10.0],
            max_listed: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationSummary {
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProxSummary {
    pub t: f64,
    pub prox_radius: f64,
    pub samples_checked: usize,
    pub worst_slack: f64,
    pub violation_count: usize,
    pub violations: Vec<ProxViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSummary {
    pub samples: usize,
    pub violation_count: usize,
    pub violations: Vec<GrowthViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzEstimate {
    pub eta: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub variation: VariationSummary,
    pub prox: Vec<ProxSummary>,
    pub growth: GrowthSummary,
    /// Empirical local Lipschitz constants; flagged only when not finite.
    pub lipschitz: Vec<LipschitzEstimate>,
    pub passed: bool,
}

fn derive_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt)
}

fn audit_times(horizon: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|k| horizon * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn variation(set: &MovingSet, grid: &TimeGrid, probes: usize, seed: u64) -> VariationSummary {
    let t_mid = 0.5 * grid.horizon();
    let probes = probe_points(set, t_mid, probes, seed);
    let ratio = variation_audit(set, grid, &probes);
    VariationSummary {
        ratio,
        passed: ratio <= 1.0 + VARIATION_RATIO_TOL,
    }
}

/// Runs the variation, prox, growth and Lipschitz audits on the scenario's
/// set and perturbation. For a reduced first-order scenario the growth and
/// Lipschitz audits act on the source perturbation through the lift.
pub fn audit_scenario(sc: &Scenario, config: &AuditConfig, seed: u64) -> AuditSummary {
    let set = sc.set();
    let horizon = sc.grid().horizon();
    let var_grid =
        TimeGrid::new(horizon, config.variation_nodes.max(1)).expect("positive horizon and steps");
    let variation = variation(
        set,
        &var_grid,
        config.variation_probes,
        derive_seed(seed, 1),
    );

    let prox: Vec<ProxSummary> = audit_times(horizon, config.prox_times)
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let report = prox_inequality_audit(
                set,
                t,
                config.prox_samples,
                derive_seed(seed, 10 + k as u64),
            );
            ProxSummary {
                t,
                prox_radius: set.prox_radius(),
                samples_checked: report.samples_checked,
                worst_slack: report.worst_slack,
                violation_count: report.violations.len(),
                violations: report
                    .violations
                    .into_iter()
                    .take(config.max_listed)
                    .collect(),
            }
        })
        .collect();

    let grid = sc.grid();
    let growth_seed = derive_seed(seed, 2);
    let lip_seed = derive_seed(seed, 3);
    let (growth, lipschitz): (Vec<GrowthViolation>, Vec<LipschitzEstimate>) = {
        let n = config.growth_samples;
        let r = config.growth_radius;
        let lip = |est: &dyn Fn(f64) -> f64| {
            config
                .lipschitz_radii
                .iter()
                .map(|&eta| LipschitzEstimate {
                    eta,
                    estimate: est(eta),
                })
                .collect::<Vec<_>>()
        };
        match sc {
            Scenario::Second(s) => (
                audit_growth(&s.perturbation, &grid, n, r, growth_seed),
                lip(&|eta| {
                    audit_lipschitz(
                        &s.perturbation,
                        &grid,
                        eta,
                        config.lipschitz_pairs,
                        lip_seed,
                    )
                }),
            ),
            Scenario::First(s) => match &s.forcing {
                StateForcing::Direct(f) => (
                    audit_growth(f, &grid, n, r, growth_seed),
                    lip(&|eta| audit_lipschitz(f, &grid, eta, config.lipschitz_pairs, lip_seed)),
                ),
                StateForcing::Lifted(g) => (
                    audit_growth_lifted(g, &grid, n, r, growth_seed),
                    lip(&|eta| {
                        audit_lipschitz_lifted(g, &grid, eta, config.lipschitz_pairs, lip_seed)
                    }),
                ),
            },
        }
    };
    let growth = GrowthSummary {
        samples: config.growth_samples,
        violation_count: growth.len(),
        violations: growth.into_iter().take(config.max_listed).collect(),
    };
    let passed = variation.passed
        && prox.iter().all(|p| p.violation_count == 0)
        && growth.violation_count == 0
        && lipschitz.iter().all(|l| l.estimate.is_finite());
    AuditSummary {
        variation,
        prox,
        growth,
        lipschitz,
        passed,
    }
}
