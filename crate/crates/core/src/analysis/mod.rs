//! Verification instruments: discrete normal-cone residuals, a-priori bound
//! checks, fine-grid references, empirical convergence orders, and the
//! bundled hypothesis audits.

mod bound_check;
mod convergence;
mod hypotheses;
mod residual;

pub use bound_check::{bound_check, BoundCheck};
pub use convergence::{
    compare_with_oracle, convergence_study, fine_grid_oracle, ConvergenceRow, ConvergenceTable,
    EmpiricalOrder, EXACT_ERROR,
};
pub use hypotheses::{
    audit_scenario, AuditConfig, AuditSummary, GrowthSummary, LipschitzEstimate, ProxSummary,
    VariationSummary, VARIATION_RATIO_TOL,
};
pub use residual::{
    residual_normal_cone, residual_normal_cone_first_order, residual_normal_cone_seeded,
    ResidualReport, StepResidual, RESIDUAL_SEED, RESIDUAL_TOL,
};
