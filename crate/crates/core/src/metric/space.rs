use std::fmt;

use crate::error::{GeomError, Result};
use crate::metric::{Point, SpaceId, TangentVector};
use crate::policy::NumericPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Euclidean,
    Sphere,
    Interval,
    OnePoint,
    EuclideanCone,
    SphericalJoin,
    ScaledProduct,
    Glued,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceKind::Euclidean => "euclidean",
            SpaceKind::Sphere => "sphere",
            SpaceKind::Interval => "interval",
            SpaceKind::OnePoint => "one-point",
            SpaceKind::EuclideanCone => "euclidean-cone",
            SpaceKind::SphericalJoin => "spherical-join",
            SpaceKind::ScaledProduct => "scaled-product",
            SpaceKind::Glued => "glued",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    pub has_exp_log: bool,
    pub has_exact_geodesics: bool,
}

/// A distance together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub error_bound: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Measured {
            value,
            error_bound: 0.0,
        }
    }
}

/// Result of a ball projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Point,
    pub moved: bool,
    /// `r - d(center, x)` when `x` was left in place, zero otherwise.
    pub slack: f64,
    /// Set when the projection had to choose between geometrically distinct
    /// candidates; holds the distance between the competing outputs.
    pub ambiguity: Option<f64>,
}

/// Closest-point projection onto a fixed closed ball, prepared once and
/// applied to many points.
pub trait BallProjector: Send + Sync {
    fn project(&self, x: &Point) -> Result<Projection>;
}

/// Geometry backend.
///
/// Implementations are immutable values; every method is pure.
pub trait Space: Send + Sync + fmt::Debug {
    fn id(&self) -> SpaceId;
    fn kind(&self) -> SpaceKind;
    /// Upper curvature bound κ.
    fn curvature_bound(&self) -> f64;
    fn diameter_bound(&self) -> Option<f64>;
    /// Distance below which geodesics are unique.
    fn uniqueness_radius(&self) -> f64;
    fn capabilities(&self) -> Capabilities;
    fn policy(&self) -> &NumericPolicy;

    /// Checks that `p` belongs to this space and satisfies its coordinate
    /// constraints.
    fn validate(&self, p: &Point) -> Result<()>;

    fn distance(&self, x: &Point, y: &Point) -> Result<f64>;

    /// Distance with an error bound; exact backends report zero.
    fn measured_distance(&self, x: &Point, y: &Point) -> Result<Measured> {
        Ok(Measured::exact(self.distance(x, y)?))
    }

    /// Constant-speed geodesic from `x` (s = 0) to `y` (s = 1).
    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point>;

    /// Closest-point projection of `x` onto the closed ball `B̄(center, r)`.
    fn project_to_ball(&self, center: &Point, r: f64, x: &Point) -> Result<Point> {
        Ok(ball_projection_via_geodesic(self, center, r, x)?.point)
    }

    /// Prepared projector for repeated projections onto one ball.
    fn ball_projector<'a>(&'a self, center: &Point, r: f64) -> Result<Box<dyn BallProjector + 'a>> {
        self.validate(center)?;
        if !(r > 0.0) {
            return Err(GeomError::Domain(format!("ball radius must be positive, got {r}")));
        }
        Ok(Box::new(GeodesicBall {
            space: self,
            center: center.clone(),
            r,
        }))
    }

    fn log_map(&self, _p: &Point, _q: &Point) -> Result<TangentVector> {
        Err(GeomError::capability("log_map", self.kind()))
    }

    fn exp_map(&self, _p: &Point, _v: &TangentVector) -> Result<Point> {
        Err(GeomError::capability("exp_map", self.kind()))
    }

    /// Orthonormal basis of the tangent space at `p` (spaces with exp/log).
    fn tangent_basis(&self, _p: &Point) -> Result<Vec<TangentVector>> {
        Err(GeomError::capability("tangent_basis", self.kind()))
    }

    /// Fails unless a geodesic of length `d` is unique in this space.
    fn check_unique(&self, d: f64) -> Result<()> {
        let radius = self.uniqueness_radius();
        if d >= radius - self.policy().uniqueness_margin {
            return Err(GeomError::NonUniqueGeodesic { distance: d, radius });
        }
        Ok(())
    }
}

/// Ball projection that walks along the geodesic `[center x]`.
pub fn ball_projection_via_geodesic<S: Space + ?Sized>(
    space: &S,
    center: &Point,
    r: f64,
    x: &Point,
) -> Result<Projection> {
    let d = space.distance(center, x)?;
    if d <= r {
        return Ok(Projection {
            point: x.clone(),
            moved: false,
            slack: r - d,
            ambiguity: None,
        });
    }
    space.check_unique(d)?;
    Ok(Projection {
        point: space.geodesic_point(center, x, r / d)?,
        moved: true,
        slack: 0.0,
        ambiguity: None,
    })
}

struct GeodesicBall<'a, S: Space + ?Sized> {
    space: &'a S,
    center: Point,
    r: f64,
}

impl<S: Space + ?Sized> BallProjector for GeodesicBall<'_, S> {
    fn project(&self, x: &Point) -> Result<Projection> {
        ball_projection_via_geodesic(self.space, &self.center, self.r, x)
    }
}
