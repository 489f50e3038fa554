use nalgebra::DVector;

use crate::error::GeometryError;
use crate::path::{ScalarPath, VectorPath};

use super::Point;

/// Membership tolerance used throughout: `u ∈ K(t)` iff `distance(K, t, u) <= FEASIBILITY_TOL`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Relative tolerance under which a point already counts as lying in the set,
/// so that projection returns it unchanged and is exactly idempotent.
const SNAP_REL: f64 = 1e-14;

const UNIT_NORMAL_TOL: f64 = 1e-12;

/// Discriminant of [`Shape`], used in reports and file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    MovingHalfSpace,
    MovingBall,
    Box,
    TranslatedBase,
    BallComplement,
    Product,
}

impl SetKind {
    pub fn name(self) -> &'static str {
        match self {
            SetKind::MovingHalfSpace => "moving_half_space",
            SetKind::MovingBall => "moving_ball",
            SetKind::Box => "box",
            SetKind::TranslatedBase => "translated_base",
            SetKind::BallComplement => "ball_complement",
            SetKind::Product => "product",
        }
    }

    pub fn all() -> [SetKind; 6] {
        [
            SetKind::MovingHalfSpace,
            SetKind::MovingBall,
            SetKind::Box,
            SetKind::TranslatedBase,
            SetKind::BallComplement,
            SetKind::Product,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `{u : ⟨normal, u⟩ >= offset(t)}` with a unit normal.
    HalfSpace {
        normal: DVector<f64>,
        offset: ScalarPath,
    },
    /// Closed ball `‖u - center(t)‖ <= radius`.
    Ball {
        center: VectorPath,
        radius: f64,
    },
    /// Per-axis interval bounds `lower_k(t) <= u_k <= upper_k(t)`.
    Box {
        lower: Vec<ScalarPath>,
        upper: Vec<ScalarPath>,
    },
    /// Complement of the open ball, `‖u - center(t)‖ >= radius`.
    BallComplement {
        center: VectorPath,
        radius: f64,
    },
    /// `base(t) + shift(t)`.
    Translated {
        base: Box<MovingSet>,
        shift: VectorPath,
    },
    Product(ProductSet),
}

/// A time-indexed closed set with its prox radius and variation modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingSet {
    shape: Shape,
    declared_radius: Option<f64>,
    horizon: Option<f64>,
}

/// `block × ℝ^free_dims`, the block coordinates first.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet {
    block: Box<MovingSet>,
    free_dims: usize,
}

fn invalid(msg: impl Into<String>) -> GeometryError {
    GeometryError::InvalidSet(msg.into())
}

fn check_radius(radius: f64) -> Result<(), GeometryError> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "radius must be positive and finite, got {radius}"
        )))
    }
}

impl MovingSet {
    fn from_shape(shape: Shape) -> Self {
        MovingSet {
            shape,
            declared_radius: None,
            horizon: None,
        }
    }

    pub fn half_space(normal: Vec<f64>, offset: ScalarPath) -> Result<Self, GeometryError> {
        let normal = DVector::from_vec(normal);
        if normal.is_empty() {
            return Err(invalid("half-space normal must be nonempty"));
        }
        if ((normal.norm() - 1.0).abs()) > UNIT_NORMAL_TOL {
            return Err(invalid(format!(
                "half-space normal must be a unit vector, norm is {}",
                normal.norm()
            )));
        }
        Ok(Self::from_shape(Shape::HalfSpace { normal, offset }))
    }

    pub fn ball(center: VectorPath, radius: f64) -> Result<Self, GeometryError> {
        check_radius(radius)?;
        if center.dim() == 0 {
            return Err(invalid("ball center must be nonempty"));
        }
        Ok(Self::from_shape(Shape::Ball { center, radius }))
    }

    pub fn ball_complement(center: VectorPath, radius: f64) -> Result<Self, GeometryError> {
        check_radius(radius)?;
        if center.dim() == 0 {
            return Err(invalid("ball complement center must be nonempty"));
        }
        Ok(Self::from_shape(Shape::BallComplement { center, radius }))
    }

    /// Box with per-axis bounds. Zero axes is allowed and denotes the one-point space `ℝ⁰`.
    pub fn boxed(lower: Vec<ScalarPath>, upper: Vec<ScalarPath>) -> Result<Self, GeometryError> {
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        Ok(Self::from_shape(Shape::Box { lower, upper }))
    }

    pub fn translated(base: MovingSet, shift: VectorPath) -> Result<Self, GeometryError> {
        if base.dim() != shift.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: base.dim(),
                found: shift.dim(),
            });
        }
        Ok(Self::from_shape(Shape::Translated {
            base: Box::new(base),
            shift,
        }))
    }

    pub fn product(block: MovingSet, free_dims: usize) -> Self {
        Self::from_shape(Shape::Product(ProductSet::new(block, free_dims)))
    }

    /// The whole space `ℝ^dim`, as `ℝ⁰ × ℝ^dim`.
    pub fn whole_space(dim: usize) -> Self {
        let point = Self::from_shape(Shape::Box {
            lower: Vec::new(),
            upper: Vec::new(),
        });
        Self::product(point, dim)
    }

    /// Overrides the prox radius carried by the set. Audits test the declared value.
    pub fn with_prox_radius(mut self, radius: f64) -> Result<Self, GeometryError> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(invalid(format!(
                "prox radius must be positive, got {radius}"
            )));
        }
        self.declared_radius = Some(radius);
        Ok(self)
    }

    /// Restricts admissible times to `[0, horizon]` and checks the set is nonempty there.
    pub fn with_horizon(mut self, horizon: f64) -> Result<Self, GeometryError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        self.check_nonempty(horizon)?;
        self.set_horizon(horizon);
        Ok(self)
    }

    fn set_horizon(&mut self, horizon: f64) {
        self.horizon = Some(horizon);
        match &mut self.shape {
            Shape::Translated { base, .. } => base.set_horizon(horizon),
            Shape::Product(ps) => ps.block.set_horizon(horizon),
            _ => {}
        }
    }

    fn check_nonempty(&self, horizon: f64) -> Result<(), GeometryError> {
        match &self.shape {
            Shape::Box { lower, upper } => {
                const SAMPLES: usize = 2048;
                for (k, (lo, hi)) in lower.iter().zip(upper).enumerate() {
                    for i in 0..=SAMPLES {
                        let t = i as f64 * horizon / SAMPLES as f64;
                        if lo.value(t) > hi.value(t) {
                            return Err(invalid(format!(
                                "box axis {k} is empty at t={t}: lower {} > upper {}",
                                lo.value(t),
                                hi.value(t)
                            )));
                        }
                    }
                }
                Ok(())
            }
            Shape::Translated { base, .. } => base.check_nonempty(horizon),
            Shape::Product(ps) => ps.block.check_nonempty(horizon),
            _ => Ok(()),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn horizon(&self) -> Option<f64> {
        self.horizon
    }

    pub fn declared_prox_radius(&self) -> Option<f64> {
        self.declared_radius
    }

    pub fn kind(&self) -> SetKind {
        match self.shape {
            Shape::HalfSpace { .. } => SetKind::MovingHalfSpace,
            Shape::Ball { .. } => SetKind::MovingBall,
            Shape::Box { .. } => SetKind::Box,
            Shape::BallComplement { .. } => SetKind::BallComplement,
            Shape::Translated { .. } => SetKind::TranslatedBase,
            Shape::Product(_) => SetKind::Product,
        }
    }

    pub fn as_product(&self) -> Option<&ProductSet> {
        match &self.shape {
            Shape::Product(ps) => Some(ps),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::HalfSpace { normal, .. } => normal.len(),
            Shape::Ball { center, .. } | Shape::BallComplement { center, .. } => center.dim(),
            Shape::Box { lower, .. } => lower.len(),
            Shape::Translated { base, .. } => base.dim(),
            Shape::Product(ps) => ps.dim(),
        }
    }

    /// Prox radius of the geometry itself, ignoring any declared override.
    pub fn intrinsic_prox_radius(&self) -> f64 {
        match &self.shape {
            Shape::BallComplement { radius, .. } => *radius,
            Shape::Translated { base, .. } => base.prox_radius(),
            Shape::Product(ps) => ps.prox_radius(),
            _ => f64::INFINITY,
        }
    }

    /// Declared prox radius, `+∞` for convex sets.
    pub fn prox_radius(&self) -> f64 {
        self.declared_radius
            .unwrap_or_else(|| self.intrinsic_prox_radius())
    }

    pub(crate) fn check_args(&self, t: f64, p: &Point) -> Result<(), GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        if !t.is_finite() || p.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if let Some(horizon) = self.horizon {
            let slack = 1e-12 * horizon;
            if t < -slack || t > horizon + slack {
                return Err(GeometryError::OutsideHorizon { t, horizon });
            }
        }
        Ok(())
    }

    /// Euclidean distance from `p` to `K(t)`.
    pub fn distance(&self, t: f64, p: &Point) -> Result<f64, GeometryError> {
        self.check_args(t, p)?;
        Ok(self.distance_unchecked(t, p))
    }

    pub fn contains(&self, t: f64, p: &Point) -> Result<bool, GeometryError> {
        Ok(self.distance(t, p)? <= FEASIBILITY_TOL)
    }

    pub(crate) fn distance_unchecked(&self, t: f64, p: &Point) -> f64 {
        match &self.shape {
            Shape::HalfSpace { normal, offset } => (offset.value(t) - normal.dot(p)).max(0.0),
            Shape::Ball { center, radius } => ((p - center.value(t)).norm() - radius).max(0.0),
            Shape::BallComplement { center, radius } => {
                (radius - (p - center.value(t)).norm()).max(0.0)
            }
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .zip(p.iter())
                .map(|((lo, hi), &v)| {
                    let excess = (lo.value(t) - v).max(v - hi.value(t)).max(0.0);
                    excess * excess
                })
                .sum::<f64>()
                .sqrt(),
            Shape::Translated { base, shift } => base.distance_unchecked(t, &(p - shift.value(t))),
            Shape::Product(ps) => ps.block.distance_unchecked(t, &ps.block_part(p)),
        }
    }

    fn snap_tolerance(&self, t: f64, p: &Point) -> f64 {
        let magnitude = match &self.shape {
            Shape::HalfSpace { offset, .. } => offset.value(t).abs(),
            Shape::Ball { center, radius } | Shape::BallComplement { center, radius } => {
                center.value(t).amax() + radius
            }
            Shape::Translated { shift, .. } => shift.value(t).amax(),
            Shape::Box { .. } | Shape::Product(_) => 0.0,
        };
        SNAP_REL * (1.0 + p.amax() + magnitude)
    }

    /// Metric projection onto `K(t)`; an error outside the uniqueness tube.
    pub fn project(&self, t: f64, p: &Point) -> Result<Point, GeometryError> {
        self.check_args(t, p)?;
        self.project_unchecked(t, p)
    }

    pub(crate) fn project_unchecked(&self, t: f64, p: &Point) -> Result<Point, GeometryError> {
        if let Shape::Product(ps) = &self.shape {
            return ps.project_unchecked(t, p);
        }
        let distance = self.distance_unchecked(t, p);
        if distance <= self.snap_tolerance(t, p) {
            return Ok(p.clone());
        }
        let prox_radius = self.prox_radius();
        if distance >= prox_radius {
            return Err(GeometryError::NonUniqueProjection {
                distance,
                prox_radius,
            });
        }
        match &self.shape {
            Shape::HalfSpace { normal, offset } => {
                // replace the normal component; exact when the normal is a coordinate axis
                Ok(p - normal * normal.dot(p) + normal * offset.value(t))
            }
            Shape::Ball { center, radius } => {
                let m = center.value(t);
                let v = p - &m;
                let n = v.norm();
                Ok(m + v * (radius / n))
            }
            Shape::BallComplement { center, radius } => {
                let m = center.value(t);
                let v = p - &m;
                let n = v.norm();
                if n == 0.0 {
                    return Err(GeometryError::NonUniqueProjection {
                        distance,
                        prox_radius,
                    });
                }
                Ok(m + v * (radius / n))
            }
            Shape::Box { lower, upper } => Ok(DVector::from_iterator(
                p.len(),
                lower
                    .iter()
                    .zip(upper)
                    .zip(p.iter())
                    .map(|((lo, hi), &v)| v.max(lo.value(t)).min(hi.value(t))),
            )),
            Shape::Translated { base, shift } => {
                let s = shift.value(t);
                Ok(base.project_unchecked(t, &(p - &s))? + s)
            }
            Shape::Product(_) => unreachable!("handled above"),
        }
    }

    /// Variation modulus `a(t) = a(t) - a(0)`, anchored at zero.
    pub fn variation(&self, t: f64) -> f64 {
        self.variation_between(0.0, t)
    }

    /// `|a(t) - a(s)|` for the canonical modulus of this kind.
    pub fn variation_between(&self, s: f64, t: f64) -> f64 {
        match &self.shape {
            Shape::HalfSpace { offset, .. } => offset.total_variation(s, t),
            Shape::Ball { center, .. } | Shape::BallComplement { center, .. } => {
                center.arc_length(s, t)
            }
            Shape::Box { lower, upper } => lower
                .iter()
                .chain(upper)
                .map(|p| p.total_variation(s, t))
                .sum(),
            Shape::Translated { base, shift } => {
                base.variation_between(s, t) + shift.arc_length(s, t)
            }
            Shape::Product(ps) => ps.block.variation_between(s, t),
        }
    }

    /// `|ȧ(t)|`.
    pub fn variation_rate(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::HalfSpace { offset, .. } => offset.derivative(t).abs(),
            Shape::Ball { center, .. } | Shape::BallComplement { center, .. } => center.speed(t),
            Shape::Box { lower, upper } => lower
                .iter()
                .chain(upper)
                .map(|p| p.derivative(t).abs())
                .sum(),
            Shape::Translated { base, shift } => base.variation_rate(t) + shift.speed(t),
            Shape::Product(ps) => ps.block.variation_rate(t),
        }
    }
}

impl ProductSet {
    pub fn new(block: MovingSet, free_dims: usize) -> Self {
        ProductSet {
            block: Box::new(block),
            free_dims,
        }
    }

    pub fn block(&self) -> &MovingSet {
        &self.block
    }

    pub fn free_dims(&self) -> usize {
        self.free_dims
    }

    pub fn dim(&self) -> usize {
        self.block.dim() + self.free_dims
    }

    /// `min(r_block, +∞)`.
    pub fn prox_radius(&self) -> f64 {
        self.block.prox_radius().min(f64::INFINITY)
    }

    pub(crate) fn block_part(&self, p: &Point) -> Point {
        p.rows(0, self.block.dim()).into_owned()
    }

    /// Projection onto the product: blockwise on the constrained part, identity on the free part.
    pub fn project(&self, t: f64, p: &Point) -> Result<Point, GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        self.block.check_args(t, &self.block_part(p))?;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        self.project_unchecked(t, p)
    }

    fn project_unchecked(&self, t: f64, p: &Point) -> Result<Point, GeometryError> {
        let block = self.block.project_unchecked(t, &self.block_part(p))?;
        let mut out = p.clone();
        out.rows_mut(0, self.block.dim()).copy_from(&block);
        Ok(out)
    }

    pub fn distance(&self, t: f64, p: &Point) -> Result<f64, GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        self.block.distance(t, &self.block_part(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn half_plane_x_ge(offset: ScalarPath) -> MovingSet {
        MovingSet::half_space(vec![1.0, 0.0], offset).unwrap()
    }

    fn unit_hole() -> MovingSet {
        MovingSet::ball_complement(VectorPath::constant(&[0.0, 0.0]), 1.0).unwrap()
    }

    /// Brute-force nearest point on a densely sampled boundary curve.
    fn nearest_on_curve(p: &Point, curve: impl Fn(f64) -> Point, lo: f64, hi: f64) -> Point {
        let n = 400_000;
        (0..=n)
            .map(|i| curve(lo + (hi - lo) * i as f64 / n as f64))
            .min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm()))
            .unwrap()
    }

    #[test]
    fn half_space_distance_examples() {
        let k = half_plane_x_ge(ScalarPath::Constant(1.0));
        assert_eq!(k.distance(0.0, &dvector![3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(k.distance(0.0, &dvector![0.0, 0.0]).unwrap(), 1.0);
        // boundary line x = 1 sampled densely
        let p = dvector![0.0, 0.0];
        let q = nearest_on_curve(&p, |s| dvector![1.0, s], -5.0, 5.0);
        assert!(((q - &p).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn product_distance_adds_nothing_from_free_block() {
        let k = MovingSet::product(half_plane_x_ge(ScalarPath::Constant(1.0)), 1);
        assert_eq!(k.distance(0.0, &dvector![0.0, 0.0, 7.0]).unwrap(), 1.0);
    }

    #[test]
    fn half_space_projection_examples() {
        let k = half_plane_x_ge(ScalarPath::Linear {
            slope: 1.0,
            offset: 0.0,
        });
        assert_eq!(
            k.project(1.0, &dvector![2.0, 5.0]).unwrap(),
            dvector![2.0, 5.0]
        );
        let p = dvector![0.0, 0.0];
        let q = k.project(1.0, &p).unwrap();
        assert_eq!(q, dvector![1.0, 0.0]);
        let brute = nearest_on_curve(&p, |s| dvector![1.0, s], -3.0, 3.0);
        assert!((brute - q).norm() < 1e-4);
    }

    #[test]
    fn ball_complement_projection_examples() {
        let k = unit_hole();
        let p = dvector![0.5, 0.0];
        let q = k.project(0.0, &p).unwrap();
        assert_eq!(q, dvector![1.0, 0.0]);
        let brute = nearest_on_curve(
            &p,
            |s| dvector![s.cos(), s.sin()],
            0.0,
            2.0 * std::f64::consts::PI,
        );
        assert!((brute - q).norm() < 1e-4);

        let err = k.project(0.0, &dvector![0.0, 0.0]).unwrap_err();
        assert!(matches!(err, GeometryError::NonUniqueProjection { .. }));
    }

    #[test]
    fn product_projection_is_blockwise() {
        let block = half_plane_x_ge(ScalarPath::Linear {
            slope: 1.0,
            offset: 0.0,
        });
        let ps = ProductSet::new(block, 1);
        assert_eq!(
            ps.project(1.0, &dvector![0.0, 0.0, 7.0]).unwrap(),
            dvector![1.0, 0.0, 7.0]
        );
        let feasible = dvector![3.0, -2.0, 7.0];
        assert_eq!(ps.project(1.0, &feasible).unwrap(), feasible);
    }

    #[test]
    fn product_prox_radius_is_block_radius() {
        let ps = ProductSet::new(unit_hole(), 2);
        assert_eq!(ps.prox_radius(), 1.0);
        let convex = ProductSet::new(half_plane_x_ge(ScalarPath::Constant(0.0)), 2);
        assert_eq!(convex.prox_radius(), f64::INFINITY);
    }

    #[test]
    fn declared_radius_overrides_and_is_inherited() {
        let k = unit_hole().with_prox_radius(2.0).unwrap();
        assert_eq!(k.prox_radius(), 2.0);
        assert_eq!(k.intrinsic_prox_radius(), 1.0);
        let shifted = MovingSet::translated(k, VectorPath::constant(&[1.0, 1.0])).unwrap();
        assert_eq!(shifted.prox_radius(), 2.0);
    }

    #[test]
    fn errors_on_bad_arguments() {
        let k = unit_hole().with_horizon(1.0).unwrap();
        assert_eq!(
            k.distance(0.0, &dvector![1.0]).unwrap_err(),
            GeometryError::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
        assert!(matches!(
            k.distance(2.0, &dvector![1.0, 1.0]).unwrap_err(),
            GeometryError::OutsideHorizon { .. }
        ));
        assert_eq!(
            k.project(0.5, &dvector![f64::NAN, 1.0]).unwrap_err(),
            GeometryError::NonFinite
        );
    }

    #[test]
    fn half_line_projection_is_exact() {
        let k = MovingSet::half_space(
            vec![1.0],
            ScalarPath::Linear {
                slope: 1.0,
                offset: 0.0,
            },
        )
        .unwrap();
        for i in 0..100 {
            let t = i as f64 * 0.37 / 7.0;
            assert_eq!(k.project(t, &dvector![-3.25]).unwrap()[0], t);
        }
    }

    #[test]
    fn whole_space_is_identity() {
        let k = MovingSet::whole_space(3);
        let p = dvector![1.0, -2.0, 3.5];
        assert_eq!(k.project(0.3, &p).unwrap(), p);
        assert_eq!(k.distance(0.3, &p).unwrap(), 0.0);
        assert_eq!(k.prox_radius(), f64::INFINITY);
    }

    #[test]
    fn empty_box_rejected_over_horizon() {
        let k = MovingSet::boxed(
            vec![ScalarPath::Linear {
                slope: 1.0,
                offset: 0.0,
            }],
            vec![ScalarPath::Constant(0.5)],
        )
        .unwrap();
        assert!(k.clone().with_horizon(0.4).is_ok());
        assert!(matches!(
            k.with_horizon(1.0),
            Err(GeometryError::InvalidSet(_))
        ));
    }

    #[test]
    fn non_unit_normal_rejected() {
        assert!(MovingSet::half_space(vec![1.0, 1.0], ScalarPath::Constant(0.0)).is_err());
    }

    #[test]
    fn ball_projection_and_rate() {
        let k = MovingSet::ball(
            VectorPath(vec![
                ScalarPath::Linear {
                    slope: 3.0,
                    offset: 0.0,
                },
                ScalarPath::Linear {
                    slope: 4.0,
                    offset: 0.0,
                },
            ]),
            1.0,
        )
        .unwrap();
        let q = k.project(1.0, &dvector![3.0, 8.0]).unwrap();
        assert!((q - dvector![3.0, 5.0]).norm() < 1e-15);
        assert_eq!(k.variation_rate(0.3), 5.0);
        assert_eq!(k.variation(2.0), 10.0);
    }
}
