//! Single-valued perturbations, their lift to the doubled state, hypothesis
//! audits, and the a-priori solution bound.

mod audit;
mod bounds;
mod lift;
mod perturbation;

pub use audit::{
    audit_growth, audit_growth_lifted, audit_lipschitz, audit_lipschitz_lifted, GrowthViolation,
    GROWTH_REL_TOL,
};
pub use bounds::{
    a_priori_bound, a_priori_constant, BoundsReport, BoundsSummary, BOUND_QUADRATURE_REFINEMENT,
};
pub use lift::{lift_perturbation, Envelope, LiftedPerturbation, StateForcing};
pub use perturbation::{Perturbation, PerturbationKind, ScalarMap};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
