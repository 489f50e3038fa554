//! Moving closed sets: distances, projections, products, and the audits that
//! certify prox-regularity and absolutely continuous motion.

mod audit;
mod set;

pub(crate) use audit::prox_sides;
pub use audit::{
    probe_points, prox_inequality_audit, variation_audit, variation_audit_with, ProxAuditReport,
    ProxViolation, PROX_AUDIT_TOL,
};
pub use set::{MovingSet, ProductSet, SetKind, Shape, FEASIBILITY_TOL};

/// A point of `ℝ^d`.
pub type Point = nalgebra::DVector<f64>;
