use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Point, Space, SpaceId, SpaceKind, TangentVector};
use crate::policy::NumericPolicy;

/// Space isometric to `[0, length]`; points are their arc parameter.
///
/// Used as the intrinsic model of a geodesic arc, so that cones and joins
/// over an arc can be unfolded exactly.
#[derive(Debug, Clone)]
pub struct IntervalSpace {
    id: SpaceId,
    length: f64,
    policy: NumericPolicy,
}

impl IntervalSpace {
    pub fn new(length: f64) -> Result<Self> {
        if !(length >= 0.0) || !length.is_finite() {
            return Err(GeomError::Configuration(format!("interval length {length} must be >= 0")));
        }
        Ok(IntervalSpace {
            id: SpaceId::fresh(),
            length,
            policy: NumericPolicy::default(),
        })
    }

    pub fn with_policy(mut self, policy: NumericPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn point(&self, a: f64) -> Result<Point> {
        let tol = self.policy.membership_tol;
        if !(a >= -tol && a <= self.length + tol) {
            return Err(GeomError::Domain(format!("parameter {a} outside [0, {}]", self.length)));
        }
        Ok(Point::vector(self.id, smallvec::smallvec![a.clamp(0.0, self.length)]))
    }

    /// Point with the parameter clamped into range.
    pub fn clamped(&self, a: f64) -> Point {
        Point::vector(self.id, smallvec::smallvec![a.clamp(0.0, self.length)])
    }

    pub fn param(&self, p: &Point) -> Result<f64> {
        p.check_space(self.id)?;
        let v = p.expect_vector()?;
        v.first()
            .copied()
            .ok_or_else(|| GeomError::Domain("interval point without parameter".into()))
    }
}

impl Space for IntervalSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Interval
    }

    fn curvature_bound(&self) -> f64 {
        0.0
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some(self.length)
    }

    fn uniqueness_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_exp_log: true,
            has_exact_geodesics: true,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let a = self.param(p)?;
        self.point(a).map(|_| ())
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok((self.param(x)? - self.param(y)?).abs())
    }

    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (a, b) = (self.param(x)?, self.param(y)?);
        Ok(self.clamped((1.0 - s) * a + s * b))
    }

    fn log_map(&self, p: &Point, q: &Point) -> Result<TangentVector> {
        let (a, b) = (self.param(p)?, self.param(q)?);
        Ok(TangentVector::from_ambient(p.clone(), &[b - a]))
    }

    fn exp_map(&self, p: &Point, v: &TangentVector) -> Result<Point> {
        let a = self.param(p)?;
        v.base.check_space(self.id)?;
        let step = v.direction.first().copied().unwrap_or(0.0) * v.magnitude;
        self.point(a + step)
    }

    fn tangent_basis(&self, p: &Point) -> Result<Vec<TangentVector>> {
        self.validate(p)?;
        Ok(vec![TangentVector {
            base: p.clone(),
            direction: smallvec::smallvec![1.0],
            magnitude: 1.0,
        }])
    }
}
