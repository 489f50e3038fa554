//! JSON scenario files.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::dynamics::{lift_perturbation, Perturbation, PerturbationKind, ScalarMap, StateForcing};
use crate::error::{GeometryError, ScenarioError, SolverError};
use crate::geometry::{MovingSet, SetKind, Shape, FEASIBILITY_TOL};
use crate::grid::TimeGrid;
use crate::path::{ScalarPath, VectorPath};
use crate::solver::{FirstOrderScenario, Quadrature, Scenario, SecondOrderScenario};

const PERTURBATION_KINDS: [&str; 5] = [
    "zero",
    "affine",
    "trigonometric_forcing",
    "componentwise_nonlinear",
    "lifted",
];

/// A scalar path as written in a file: a bare number or a one-key object
/// `{"constant": c}`, `{"linear": {...}}`, `{"sinusoid": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec(pub ScalarPath);

impl Serialize for PathSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = match self.0 {
            ScalarPath::Constant(c) => json!(c),
            ScalarPath::Linear { slope, offset } => {
                json!({ "linear": { "slope": slope, "offset": offset } })
            }
            ScalarPath::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => json!({ "sinusoid": {
                "amplitude": amplitude,
                "frequency": frequency,
                "phase": phase,
                "offset": offset,
            }}),
        };
        v.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearForm {
    slope: f64,
    #[serde(default)]
    offset: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SinusoidForm {
    amplitude: f64,
    frequency: f64,
    #[serde(default)]
    phase: f64,
    #[serde(default)]
    offset: f64,
}

impl<'de> Deserialize<'de> for PathSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let expected = "a number or one of {\"constant\": c}, {\"linear\": ..}, {\"sinusoid\": ..}";
        if let Some(c) = v.as_f64() {
            return Ok(PathSpec(ScalarPath::Constant(c)));
        }
        let obj = v
            .as_object()
            .filter(|o| o.len() == 1)
            .ok_or_else(|| D::Error::custom(format!("expected {expected}")))?;
        let (form, body) = obj.iter().next().expect("one entry");
        let path = match form.as_str() {
            "constant" => ScalarPath::Constant(f64::deserialize(body).map_err(D::Error::custom)?),
            "linear" => {
                let l = LinearForm::deserialize(body).map_err(D::Error::custom)?;
                ScalarPath::Linear {
                    slope: l.slope,
                    offset: l.offset,
                }
            }
            "sinusoid" => {
                let s = SinusoidForm::deserialize(body).map_err(D::Error::custom)?;
                ScalarPath::Sinusoid {
                    amplitude: s.amplitude,
                    frequency: s.frequency,
                    phase: s.phase,
                    offset: s.offset,
                }
            }
            other => {
                return Err(D::Error::custom(format!(
                    "unknown path form `{other}`, expected {expected}"
                )))
            }
        };
        Ok(PathSpec(path))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    MovingHalfSpace {
        normal: Vec<f64>,
        offset: PathSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prox_radius: Option<f64>,
    },
    MovingBall {
        center: Vec<PathSpec>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prox_radius: Option<f64>,
    },
    Box {
        lower: Vec<PathSpec>,
        upper: Vec<PathSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prox_radius: Option<f64>,
    },
    BallComplement {
        center: Vec<PathSpec>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prox_radius: Option<f64>,
    },
    TranslatedBase {
        base: Box<SetSpec>,
        translation: Vec<PathSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prox_radius: Option<f64>,
    },
    Product {
        block: Box<SetSpec>,
        free_dims: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prox_radius: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    Zero {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        growth_envelope: Option<PathSpec>,
    },
    Affine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        position_matrix: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        velocity_matrix: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bias: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        time_coefficient: Option<PathSpec>,
        growth_envelope: Option<PathSpec>,
    },
    TrigonometricForcing {
        direction: Vec<f64>,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
        growth_envelope: Option<PathSpec>,
    },
    ComponentwiseNonlinear {
        #[serde(default = "zero_map")]
        position: String,
        #[serde(default = "zero_map")]
        velocity: String,
        growth_envelope: Option<PathSpec>,
    },
    /// Order-1 files only: the state forcing `(f(t, x, u), -u)` built from `source`.
    Lifted { source: Box<PerturbationSpec> },
}

fn one() -> f64 {
    1.0
}

fn zero_map() -> String {
    "zero".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub u0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "left")]
    pub quadrature: String,
}

fn left() -> String {
    "left".into()
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec { quadrature: left() }
    }
}

/// Serialized form of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioFile {
    pub order: u8,
    pub horizon: f64,
    pub steps: usize,
    pub set: SetSpec,
    pub perturbation: PerturbationSpec,
    pub initial: InitialSpec,
    pub solver: SolverSpec,
}

// ---------------------------------------------------------------------------
// raw bodies: `set` and `perturbation` are parsed variant by variant so that
// errors keep the full field path

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    order: u8,
    horizon: f64,
    steps: usize,
    set: Value,
    #[serde(default)]
    perturbation: Option<Value>,
    initial: InitialSpec,
    #[serde(default)]
    solver: SolverSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfSpaceBody {
    normal: Vec<f64>,
    offset: PathSpec,
    #[serde(default)]
    prox_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallBody {
    center: Vec<PathSpec>,
    radius: f64,
    #[serde(default)]
    prox_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxBody {
    lower: Vec<PathSpec>,
    upper: Vec<PathSpec>,
    #[serde(default)]
    prox_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TranslatedBody {
    translation: Vec<PathSpec>,
    #[serde(default)]
    prox_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductBody {
    free_dims: usize,
    #[serde(default)]
    prox_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroBody {
    #[serde(default)]
    growth_envelope: Option<PathSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineBody {
    #[serde(default)]
    position_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    velocity_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    bias: Option<Vec<f64>>,
    #[serde(default)]
    time_coefficient: Option<PathSpec>,
    #[serde(default)]
    growth_envelope: Option<PathSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigBody {
    direction: Vec<f64>,
    #[serde(default = "one")]
    frequency: f64,
    #[serde(default)]
    phase: f64,
    #[serde(default)]
    growth_envelope: Option<PathSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentwiseBody {
    #[serde(default = "zero_map")]
    position: String,
    #[serde(default = "zero_map")]
    velocity: String,
    #[serde(default)]
    growth_envelope: Option<PathSpec>,
}

fn join(field: &str, sub: &str) -> String {
    match (field.is_empty(), sub.is_empty() || sub == ".") {
        (_, true) => field.to_string(),
        (true, false) => sub.to_string(),
        (false, false) if sub.starts_with('[') => format!("{field}{sub}"),
        (false, false) => format!("{field}.{sub}"),
    }
}

fn de<T: serde::de::DeserializeOwned>(v: Value, field: &str) -> Result<T, ScenarioError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let field = join(field, &e.path().to_string());
        ScenarioError::Invalid {
            field: if field.is_empty() {
                "scenario".into()
            } else {
                field
            },
            reason: e.into_inner().to_string(),
        }
    })
}

/// Splits `{kind, ...}` into the kind and the remaining body.
fn tagged(v: Value, field: &str) -> Result<(String, Value), ScenarioError> {
    let Value::Object(mut obj) = v else {
        return Err(ScenarioError::invalid(
            field,
            "expected an object with a `kind`",
        ));
    };
    match obj.remove("kind") {
        Some(Value::String(kind)) => Ok((kind, Value::Object(obj))),
        Some(_) => Err(ScenarioError::invalid(
            join(field, "kind"),
            "expected a string",
        )),
        None => Err(ScenarioError::invalid(field, "missing field `kind`")),
    }
}

fn take(body: &mut Value, key: &str, field: &str) -> Result<Value, ScenarioError> {
    body.as_object_mut()
        .and_then(|o| o.remove(key))
        .ok_or_else(|| ScenarioError::invalid(field, format!("missing field `{key}`")))
}

fn parse_set(v: Value, field: &str) -> Result<SetSpec, ScenarioError> {
    let (kind, mut body) = tagged(v, field)?;
    Ok(match kind.as_str() {
        "moving_half_space" => {
            let b: HalfSpaceBody = de(body, field)?;
            SetSpec::MovingHalfSpace {
                normal: b.normal,
                offset: b.offset,
                prox_radius: b.prox_radius,
            }
        }
        "moving_ball" | "ball_complement" => {
            let b: BallBody = de(body, field)?;
            if kind == "moving_ball" {
                SetSpec::MovingBall {
                    center: b.center,
                    radius: b.radius,
                    prox_radius: b.prox_radius,
                }
            } else {
                SetSpec::BallComplement {
                    center: b.center,
                    radius: b.radius,
                    prox_radius: b.prox_radius,
                }
            }
        }
        "box" => {
            let b: BoxBody = de(body, field)?;
            SetSpec::Box {
                lower: b.lower,
                upper: b.upper,
                prox_radius: b.prox_radius,
            }
        }
        "translated_base" => {
            let base_field = join(field, "base");
            let base = parse_set(take(&mut body, "base", field)?, &base_field)?;
            let b: TranslatedBody = de(body, field)?;
            SetSpec::TranslatedBase {
                base: Box::new(base),
                translation: b.translation,
                prox_radius: b.prox_radius,
            }
        }
        "product" => {
            let block_field = join(field, "block");
            let block = parse_set(take(&mut body, "block", field)?, &block_field)?;
            let b: ProductBody = de(body, field)?;
            SetSpec::Product {
                block: Box::new(block),
                free_dims: b.free_dims,
                prox_radius: b.prox_radius,
            }
        }
        _ => {
            return Err(ScenarioError::UnknownKind {
                field: join(field, "kind"),
                kind,
            })
        }
    })
}

fn parse_perturbation(v: Value, field: &str) -> Result<PerturbationSpec, ScenarioError> {
    let (kind, mut body) = tagged(v, field)?;
    Ok(match kind.as_str() {
        "zero" => {
            let b: ZeroBody = de(body, field)?;
            PerturbationSpec::Zero {
                growth_envelope: b.growth_envelope,
            }
        }
        "affine" => {
            let b: AffineBody = de(body, field)?;
            PerturbationSpec::Affine {
                position_matrix: b.position_matrix,
                velocity_matrix: b.velocity_matrix,
                bias: b.bias,
                time_coefficient: b.time_coefficient,
                growth_envelope: b.growth_envelope,
            }
        }
        "trigonometric_forcing" => {
            let b: TrigBody = de(body, field)?;
            PerturbationSpec::TrigonometricForcing {
                direction: b.direction,
                frequency: b.frequency,
                phase: b.phase,
                growth_envelope: b.growth_envelope,
            }
        }
        "componentwise_nonlinear" => {
            let b: ComponentwiseBody = de(body, field)?;
            PerturbationSpec::ComponentwiseNonlinear {
                position: b.position,
                velocity: b.velocity,
                growth_envelope: b.growth_envelope,
            }
        }
        "lifted" => {
            let source_field = join(field, "source");
            let source = parse_perturbation(take(&mut body, "source", field)?, &source_field)?;
            if let Some(extra) = body.as_object().and_then(|o| o.keys().next()) {
                return Err(ScenarioError::invalid(
                    field,
                    format!("unknown field `{extra}`"),
                ));
            }
            PerturbationSpec::Lifted {
                source: Box::new(source),
            }
        }
        _ => {
            return Err(ScenarioError::UnknownKind {
                field: join(field, "kind"),
                kind,
            })
        }
    })
}

// ---------------------------------------------------------------------------
// parsing

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    read_scenario_file(text)?.to_scenario()
}

/// Syntax, kind and shape checks only; no semantic validation.
pub fn read_scenario_file(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    check_kinds(&value)?;
    let raw: RawFile = de(value, "")?;
    let perturbation = match raw.perturbation {
        Some(v) => parse_perturbation(v, "perturbation")?,
        None => PerturbationSpec::Zero {
            growth_envelope: None,
        },
    };
    Ok(ScenarioFile {
        order: raw.order,
        horizon: raw.horizon,
        steps: raw.steps,
        set: parse_set(raw.set, "set")?,
        perturbation,
        initial: raw.initial,
        solver: raw.solver,
    })
}

fn check_kinds(root: &Value) -> Result<(), ScenarioError> {
    let set_kinds: Vec<&str> = SetKind::all().iter().map(|k| k.name()).collect();
    fn walk(
        v: &Value,
        field: &str,
        known: &[&str],
        children: &[&str],
    ) -> Result<(), ScenarioError> {
        let Some(obj) = v.as_object() else {
            return Ok(());
        };
        if let Some(kind) = obj.get("kind").and_then(Value::as_str) {
            if !known.contains(&kind) {
                return Err(ScenarioError::UnknownKind {
                    field: format!("{field}.kind"),
                    kind: kind.into(),
                });
            }
        }
        for child in children {
            if let Some(c) = obj.get(*child) {
                walk(c, &format!("{field}.{child}"), known, children)?;
            }
        }
        Ok(())
    }
    if let Some(set) = root.get("set") {
        walk(set, "set", &set_kinds, &["base", "block"])?;
    }
    if let Some(p) = root.get("perturbation") {
        walk(p, "perturbation", &PERTURBATION_KINDS, &["source"])?;
        let mut node = p;
        let mut field = String::from("perturbation");
        while let Some(src) = node.get("source") {
            node = src;
            field.push_str(".source");
        }
        for map in ["position", "velocity"] {
            if node.get("kind").and_then(Value::as_str) != Some("componentwise_nonlinear") {
                break;
            }
            if let Some(name) = node.get(map).and_then(Value::as_str) {
                if ScalarMap::from_name(name).is_none() {
                    return Err(ScenarioError::UnknownKind {
                        field: format!("{field}.{map}"),
                        kind: name.into(),
                    });
                }
            }
        }
    }
    if let Some(q) = root.pointer("/solver/quadrature").and_then(Value::as_str) {
        if Quadrature::from_name(q).is_none() {
            return Err(ScenarioError::UnknownKind {
                field: "solver.quadrature".into(),
                kind: q.into(),
            });
        }
    }
    Ok(())
}

fn geometry_error(field: &str, e: GeometryError) -> ScenarioError {
    match e {
        GeometryError::DimensionMismatch { expected, found } => ScenarioError::DimensionMismatch {
            field: field.into(),
            expected,
            found,
        },
        other => ScenarioError::invalid(field, other.to_string()),
    }
}

fn check_len(field: &str, expected: usize, found: usize) -> Result<(), ScenarioError> {
    if expected != found {
        return Err(ScenarioError::DimensionMismatch {
            field: field.into(),
            expected,
            found,
        });
    }
    Ok(())
}

fn paths(v: &[PathSpec]) -> Vec<ScalarPath> {
    v.iter().map(|p| p.0).collect()
}

impl SetSpec {
    fn prox_radius(&self) -> Option<f64> {
        match self {
            SetSpec::MovingHalfSpace { prox_radius, .. }
            | SetSpec::MovingBall { prox_radius, .. }
            | SetSpec::Box { prox_radius, .. }
            | SetSpec::BallComplement { prox_radius, .. }
            | SetSpec::TranslatedBase { prox_radius, .. }
            | SetSpec::Product { prox_radius, .. } => *prox_radius,
        }
    }

    pub fn to_set(&self, field: &str) -> Result<MovingSet, ScenarioError> {
        let set = match self {
            SetSpec::MovingHalfSpace { normal, offset, .. } => {
                MovingSet::half_space(normal.clone(), offset.0)
                    .map_err(|e| geometry_error(&format!("{field}.normal"), e))?
            }
            SetSpec::MovingBall { center, radius, .. } => {
                MovingSet::ball(VectorPath(paths(center)), *radius)
                    .map_err(|e| geometry_error(field, e))?
            }
            SetSpec::BallComplement { center, radius, .. } => {
                MovingSet::ball_complement(VectorPath(paths(center)), *radius)
                    .map_err(|e| geometry_error(field, e))?
            }
            SetSpec::Box { lower, upper, .. } => {
                check_len(&format!("{field}.upper"), lower.len(), upper.len())?;
                MovingSet::boxed(paths(lower), paths(upper))
                    .map_err(|e| geometry_error(field, e))?
            }
            SetSpec::TranslatedBase {
                base, translation, ..
            } => {
                let base = base.to_set(&format!("{field}.base"))?;
                check_len(
                    &format!("{field}.translation"),
                    base.dim(),
                    translation.len(),
                )?;
                MovingSet::translated(base, VectorPath(paths(translation)))
                    .map_err(|e| geometry_error(field, e))?
            }
            SetSpec::Product {
                block, free_dims, ..
            } => MovingSet::product(block.to_set(&format!("{field}.block"))?, *free_dims),
        };
        match self.prox_radius() {
            Some(r) => set
                .with_prox_radius(r)
                .map_err(|e| geometry_error(&format!("{field}.prox_radius"), e)),
            None => Ok(set),
        }
    }

    pub fn from_set(set: &MovingSet) -> Self {
        let prox_radius = set.declared_prox_radius();
        let specs = |v: &VectorPath| v.0.iter().copied().map(PathSpec).collect::<Vec<_>>();
        match set.shape() {
            Shape::HalfSpace { normal, offset } => SetSpec::MovingHalfSpace {
                normal: normal.iter().copied().collect(),
                offset: PathSpec(*offset),
                prox_radius,
            },
            Shape::Ball { center, radius } => SetSpec::MovingBall {
                center: specs(center),
                radius: *radius,
                prox_radius,
            },
            Shape::BallComplement { center, radius } => SetSpec::BallComplement {
                center: specs(center),
                radius: *radius,
                prox_radius,
            },
            Shape::Box { lower, upper } => SetSpec::Box {
                lower: lower.iter().copied().map(PathSpec).collect(),
                upper: upper.iter().copied().map(PathSpec).collect(),
                prox_radius,
            },
            Shape::Translated { base, shift } => SetSpec::TranslatedBase {
                base: Box::new(SetSpec::from_set(base)),
                translation: specs(shift),
                prox_radius,
            },
            Shape::Product(ps) => SetSpec::Product {
                block: Box::new(SetSpec::from_set(ps.block())),
                free_dims: ps.free_dims(),
                prox_radius,
            },
        }
    }
}

fn matrix(
    field: &str,
    rows: &Option<Vec<Vec<f64>>>,
    dim: usize,
) -> Result<DMatrix<f64>, ScenarioError> {
    let Some(rows) = rows else {
        return Ok(DMatrix::zeros(dim, dim));
    };
    check_len(field, dim, rows.len())?;
    for (i, row) in rows.iter().enumerate() {
        check_len(&format!("{field}[{i}]"), dim, row.len())?;
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl PerturbationSpec {
    fn growth(
        field: &str,
        envelope: &Option<PathSpec>,
        horizon: f64,
    ) -> Result<ScalarPath, ScenarioError> {
        let field = format!("{field}.growth_envelope");
        let path = envelope
            .ok_or_else(|| ScenarioError::invalid(&field, "required for this kind"))?
            .0;
        let (lo, _) = path.range(0.0, horizon);
        if lo.is_nan() || lo < 0.0 {
            return Err(ScenarioError::invalid(
                &field,
                format!("must be nonnegative on [0, T], minimum is {lo}"),
            ));
        }
        Ok(path)
    }

    /// Builds `f` on `ℝ^dim × ℝ^dim`. `Lifted` is rejected here.
    pub fn to_perturbation(
        &self,
        field: &str,
        dim: usize,
        horizon: f64,
    ) -> Result<Perturbation, ScenarioError> {
        let (kind, growth) = match self {
            PerturbationSpec::Zero { growth_envelope } => {
                let growth = match growth_envelope {
                    Some(_) => Self::growth(field, growth_envelope, horizon)?,
                    None => ScalarPath::Constant(0.0),
                };
                (PerturbationKind::Zero, growth)
            }
            PerturbationSpec::Affine {
                position_matrix,
                velocity_matrix,
                bias,
                time_coefficient,
                growth_envelope,
            } => {
                let position = matrix(&format!("{field}.position_matrix"), position_matrix, dim)?;
                let velocity = matrix(&format!("{field}.velocity_matrix"), velocity_matrix, dim)?;
                let bias = match bias {
                    Some(b) => {
                        check_len(&format!("{field}.bias"), dim, b.len())?;
                        DVector::from_vec(b.clone())
                    }
                    None => DVector::zeros(dim),
                };
                let kind = PerturbationKind::Affine {
                    position,
                    velocity,
                    bias,
                    time_coefficient: time_coefficient.map(|p| p.0),
                };
                (kind, Self::growth(field, growth_envelope, horizon)?)
            }
            PerturbationSpec::TrigonometricForcing {
                direction,
                frequency,
                phase,
                growth_envelope,
            } => {
                check_len(&format!("{field}.direction"), dim, direction.len())?;
                let kind = PerturbationKind::TrigonometricForcing {
                    direction: DVector::from_vec(direction.clone()),
                    frequency: *frequency,
                    phase: *phase,
                };
                (kind, Self::growth(field, growth_envelope, horizon)?)
            }
            PerturbationSpec::ComponentwiseNonlinear {
                position,
                velocity,
                growth_envelope,
            } => {
                let map = |name: &str, sub: &str| {
                    ScalarMap::from_name(name).ok_or_else(|| ScenarioError::UnknownKind {
                        field: format!("{field}.{sub}"),
                        kind: name.into(),
                    })
                };
                let kind = PerturbationKind::Componentwise {
                    position: map(position, "position")?,
                    velocity: map(velocity, "velocity")?,
                };
                (kind, Self::growth(field, growth_envelope, horizon)?)
            }
            PerturbationSpec::Lifted { .. } => {
                return Err(ScenarioError::invalid(
                    format!("{field}.kind"),
                    "`lifted` is only valid as the perturbation of an order-1 scenario",
                ))
            }
        };
        Perturbation::new(kind, dim, growth)
            .map_err(|e| ScenarioError::invalid(field, e.to_string()))
    }

    pub fn from_perturbation(f: &Perturbation) -> Self {
        let growth_envelope = Some(PathSpec(*f.growth_path()));
        match f.kind() {
            PerturbationKind::Zero => PerturbationSpec::Zero { growth_envelope },
            PerturbationKind::Affine {
                position,
                velocity,
                bias,
                time_coefficient,
            } => PerturbationSpec::Affine {
                position_matrix: Some(rows_of(position)),
                velocity_matrix: Some(rows_of(velocity)),
                bias: Some(bias.iter().copied().collect()),
                time_coefficient: time_coefficient.map(PathSpec),
                growth_envelope,
            },
            PerturbationKind::TrigonometricForcing {
                direction,
                frequency,
                phase,
            } => PerturbationSpec::TrigonometricForcing {
                direction: direction.iter().copied().collect(),
                frequency: *frequency,
                phase: *phase,
                growth_envelope,
            },
            PerturbationKind::Componentwise { position, velocity } => {
                PerturbationSpec::ComponentwiseNonlinear {
                    position: position.name().into(),
                    velocity: velocity.name().into(),
                    growth_envelope,
                }
            }
        }
    }
}

fn solver_error(e: SolverError) -> ScenarioError {
    match e {
        SolverError::InfeasibleInitialState { distance } => ScenarioError::InfeasibleInitialState {
            field: "initial.u0".into(),
            distance,
        },
        SolverError::Geometry(g) => geometry_error("set", g),
        other => ScenarioError::invalid("scenario", other.to_string()),
    }
}

impl ScenarioFile {
    /// Full validation into a solvable scenario.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(ScenarioError::invalid(
                "horizon",
                format!("must be positive and finite, got {}", self.horizon),
            ));
        }
        let grid = TimeGrid::new(self.horizon, self.steps)
            .map_err(|e| ScenarioError::invalid("steps", e.to_string()))?;
        let quadrature = Quadrature::from_name(&self.solver.quadrature).ok_or_else(|| {
            ScenarioError::UnknownKind {
                field: "solver.quadrature".into(),
                kind: self.solver.quadrature.clone(),
            }
        })?;
        let set = self
            .set
            .to_set("set")?
            .with_horizon(self.horizon)
            .map_err(|e| geometry_error("set", e))?;
        let d = set.dim();
        check_len("initial.u0", d, self.initial.u0.len())?;
        let u0 = DVector::from_vec(self.initial.u0.clone());
        let distance = set
            .distance(0.0, &u0)
            .map_err(|e| geometry_error("initial.u0", e))?;
        if distance.is_nan() || distance > FEASIBILITY_TOL {
            return Err(ScenarioError::InfeasibleInitialState {
                field: "initial.u0".into(),
                distance,
            });
        }
        let scenario: Scenario = match self.order {
            1 => {
                if self.initial.x0.is_some() {
                    return Err(ScenarioError::invalid(
                        "initial.x0",
                        "order-1 scenarios take their whole state from u0",
                    ));
                }
                let forcing = match &self.perturbation {
                    PerturbationSpec::Lifted { source } => {
                        if d % 2 != 0 {
                            return Err(ScenarioError::invalid(
                                "perturbation.kind",
                                format!("a lifted forcing needs an even state dimension, got {d}"),
                            ));
                        }
                        let f =
                            source.to_perturbation("perturbation.source", d / 2, self.horizon)?;
                        StateForcing::Lifted(lift_perturbation(&f))
                    }
                    other => StateForcing::Direct(other.to_perturbation(
                        "perturbation",
                        d,
                        self.horizon,
                    )?),
                };
                FirstOrderScenario::new(set, forcing, u0, grid)
                    .map_err(solver_error)?
                    .with_quadrature(quadrature)
                    .into()
            }
            2 => {
                let x0 =
                    self.initial.x0.as_ref().ok_or_else(|| {
                        ScenarioError::invalid("initial.x0", "required for order 2")
                    })?;
                check_len("initial.x0", d, x0.len())?;
                let f = self
                    .perturbation
                    .to_perturbation("perturbation", d, self.horizon)?;
                SecondOrderScenario::new(set, f, DVector::from_vec(x0.clone()), u0, grid)
                    .map_err(solver_error)?
                    .with_quadrature(quadrature)
                    .into()
            }
            other => {
                return Err(ScenarioError::invalid(
                    "order",
                    format!("must be 1 or 2, got {other}"),
                ))
            }
        };
        Ok(scenario)
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        let grid = sc.grid();
        let vec = |p: &DVector<f64>| p.iter().copied().collect::<Vec<_>>();
        let (perturbation, initial) = match sc {
            Scenario::First(s) => {
                let p = match &s.forcing {
                    StateForcing::Direct(f) => PerturbationSpec::from_perturbation(f),
                    StateForcing::Lifted(l) => PerturbationSpec::Lifted {
                        source: Box::new(PerturbationSpec::from_perturbation(l.source())),
                    },
                };
                (
                    p,
                    InitialSpec {
                        x0: None,
                        u0: vec(&s.initial),
                    },
                )
            }
            Scenario::Second(s) => (
                PerturbationSpec::from_perturbation(&s.perturbation),
                InitialSpec {
                    x0: Some(vec(&s.x0)),
                    u0: vec(&s.u0),
                },
            ),
        };
        ScenarioFile {
            order: sc.order(),
            horizon: grid.horizon(),
            steps: grid.steps(),
            set: SetSpec::from_set(sc.set()),
            perturbation,
            initial,
            solver: SolverSpec {
                quadrature: sc.quadrature().name().into(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario files always serialize");
        s.push('\n');
        s
    }
}

pub fn scenario_to_json(sc: &Scenario) -> String {
    ScenarioFile::from_scenario(sc).to_json()
}

pub fn write_scenario(sc: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(sc)).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}
