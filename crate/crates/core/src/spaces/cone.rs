use std::f64::consts::PI;
use std::sync::Arc;

use super::{cone_law_sq, sector_point};
use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Coords, Point, Space, SpaceId, SpaceKind};
use crate::policy::NumericPolicy;

/// Euclidean cone over a base of diameter at most π.
///
/// Points are pairs `(radius, base point)`; the tip is any point of radius 0.
#[derive(Debug, Clone)]
pub struct EuclideanConeSpace {
    id: SpaceId,
    base: Arc<dyn Space>,
    policy: NumericPolicy,
}

impl EuclideanConeSpace {
    pub fn new(base: Arc<dyn Space>) -> Result<Self> {
        let policy = *base.policy();
        match base.diameter_bound() {
            Some(d) if d <= PI + policy.abs_tol => {}
            other => {
                return Err(GeomError::Domain(format!(
                    "cone base must have diameter <= π, got {other:?}"
                )))
            }
        }
        Ok(EuclideanConeSpace {
            id: SpaceId::fresh(),
            base,
            policy,
        })
    }

    pub fn base(&self) -> &Arc<dyn Space> {
        &self.base
    }

    pub fn point(&self, radius: f64, base: Point) -> Result<Point> {
        if !(radius >= -self.policy.membership_tol) || !radius.is_finite() {
            return Err(GeomError::Domain(format!("cone radius {radius} must be >= 0")));
        }
        self.base.validate(&base)?;
        Ok(self.raw(radius.max(0.0), base))
    }

    fn raw(&self, radius: f64, base: Point) -> Point {
        Point::new(
            self.id,
            Coords::Cone {
                radius,
                base: Box::new(base),
            },
        )
    }

    fn parts<'p>(&self, p: &'p Point) -> Result<(f64, &'p Point)> {
        p.check_space(self.id)?;
        match p.coords() {
            Coords::Cone { radius, base } => Ok((*radius, base)),
            _ => Err(GeomError::Domain("expected cone coordinates".into())),
        }
    }

    fn base_angle(&self, u1: &Point, u2: &Point) -> Result<f64> {
        Ok(self.base.distance(u1, u2)?.min(PI))
    }
}

impl Space for EuclideanConeSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::EuclideanCone
    }

    fn curvature_bound(&self) -> f64 {
        0.0
    }

    fn diameter_bound(&self) -> Option<f64> {
        None
    }

    fn uniqueness_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_exp_log: false,
            has_exact_geodesics: self.base.capabilities().has_exact_geodesics,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let (r, b) = self.parts(p)?;
        if r < 0.0 {
            return Err(GeomError::Domain("negative cone radius".into()));
        }
        self.base.validate(b)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let (t1, u1) = self.parts(x)?;
        let (t2, u2) = self.parts(y)?;
        if t1 == 0.0 || t2 == 0.0 {
            return Ok((t1 - t2).abs());
        }
        let theta = self.base_angle(u1, u2)?;
        Ok(cone_law_sq(t1, t2, theta).max(0.0).sqrt())
    }

    /// Geodesics are pulled back from straight segments in the planar
    /// unfolding of the sector spanned by the base geodesic `[u1 u2]`; when
    /// the base angle reaches π the segment runs through the tip.
    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (t1, u1) = self.parts(x)?;
        let (t2, u2) = self.parts(y)?;
        if s == 0.0 {
            return Ok(x.clone());
        }
        if s == 1.0 {
            return Ok(y.clone());
        }
        if t1 == 0.0 {
            return Ok(self.raw(s * t2, u2.clone()));
        }
        if t2 == 0.0 {
            return Ok(self.raw((1.0 - s) * t1, u1.clone()));
        }
        let theta = self.base_angle(u1, u2)?;
        if theta == 0.0 {
            return Ok(self.raw((1.0 - s) * t1 + s * t2, u1.clone()));
        }
        if theta >= PI - self.policy.abs_tol {
            let along = (1.0 - s) * t1 - s * t2;
            return Ok(if along >= 0.0 {
                self.raw(along, u1.clone())
            } else {
                self.raw(-along, u2.clone())
            });
        }
        let (rho, phi) = sector_point(t1, t2, theta, s);
        let frac = (phi / theta).clamp(0.0, 1.0);
        let base = self.base.geodesic_point(u1, u2, frac)?;
        Ok(self.raw(rho, base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{IntervalSpace, SphereSpace};

    #[test]
    fn unit_points_at_right_angle() {
        let circle = Arc::new(SphereSpace::unit(1));
        let cone = EuclideanConeSpace::new(circle.clone()).unwrap();
        let x = cone.point(1.0, circle.point(&[1.0, 0.0]).unwrap()).unwrap();
        let y = cone.point(1.0, circle.point(&[0.0, 1.0]).unwrap()).unwrap();
        // Unfolded into the plane: (1, 0) and (0, 1).
        assert!((cone.distance(&x, &y).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(cone.distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn radial_rays_are_geodesics() {
        let arc: Arc<dyn Space> = Arc::new(IntervalSpace::new(2.0).unwrap());
        let base = arc.clone();
        let cone = EuclideanConeSpace::new(arc).unwrap();
        let u = Point::vector(base.id(), smallvec::smallvec![0.7]);
        let x = cone.point(0.3, u.clone()).unwrap();
        let y = cone.point(2.5, u).unwrap();
        assert_eq!(cone.distance(&x, &y).unwrap(), 2.2);
    }

    #[test]
    fn sector_midpoint_radius() {
        let theta = 1.1;
        let arc: Arc<dyn Space> = Arc::new(IntervalSpace::new(2.0).unwrap());
        let id = arc.id();
        let cone = EuclideanConeSpace::new(arc).unwrap();
        let x = cone.point(1.0, Point::vector(id, smallvec::smallvec![0.0])).unwrap();
        let y = cone.point(1.0, Point::vector(id, smallvec::smallvec![theta])).unwrap();
        let m = cone.geodesic_point(&x, &y, 0.5).unwrap();
        match m.coords() {
            Coords::Cone { radius, base } => {
                assert!((radius - (theta / 2.0).cos()).abs() < 1e-15);
                assert!((base.as_slice().unwrap()[0] - theta / 2.0).abs() < 1e-15);
            }
            _ => panic!("expected cone point"),
        }
    }

    #[test]
    fn straight_through_tip_when_angle_is_pi() {
        let arc: Arc<dyn Space> = Arc::new(IntervalSpace::new(PI).unwrap());
        let id = arc.id();
        let cone = EuclideanConeSpace::new(arc).unwrap();
        let x = cone.point(1.0, Point::vector(id, smallvec::smallvec![0.0])).unwrap();
        let y = cone.point(3.0, Point::vector(id, smallvec::smallvec![PI])).unwrap();
        assert!((cone.distance(&x, &y).unwrap() - 4.0).abs() < 1e-15);
        let q = cone.geodesic_point(&x, &y, 0.5).unwrap();
        assert!((cone.distance(&x, &q).unwrap() - 2.0).abs() < 1e-14);
    }
}
