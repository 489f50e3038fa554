use thiserror::Error;

/// Failures of the set kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("time {t} outside horizon [0, {horizon}]")]
    OutsideHorizon { t: f64, horizon: f64 },
    #[error("projection is not unique: distance {distance} >= prox radius {prox_radius}")]
    NonUniqueProjection { distance: f64, prox_radius: f64 },
    #[error("non-finite coordinate in input point")]
    NonFinite,
    #[error("invalid set: {0}")]
    InvalidSet(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("initial state is infeasible: distance {distance} to the set at t=0")]
    InfeasibleInitialState { distance: f64 },
    #[error(
        "step {step} left the uniqueness tube: distance {distance} >= prox radius {prox_radius}"
    )]
    NonUniqueProjection {
        step: usize,
        distance: f64,
        prox_radius: f64,
    },
    #[error("refinement factor must be at least 2, got {0}")]
    RefineFactor(usize),
    #[error("convergence study needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
    #[error("trajectory and scenario are incompatible: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Validation and IO failures when reading or writing scenario files and trajectories.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown kind `{kind}` in field `{field}`")]
    UnknownKind { field: String, kind: String },
    #[error("field `{field}`: initial state is infeasible (distance {distance})")]
    InfeasibleInitialState { field: String, distance: f64 },
    #[error("field `{field}`: dimension mismatch, expected {expected}, found {found}")]
    DimensionMismatch {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ScenarioError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
