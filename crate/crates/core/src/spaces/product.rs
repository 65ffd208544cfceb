use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Coords, Point, Space, SpaceId, SpaceKind};
use crate::policy::NumericPolicy;

/// `c·(U × V)` with the ℓ² product metric scaled by `c`.
#[derive(Debug, Clone)]
pub struct ScaledProductSpace {
    id: SpaceId,
    left: Arc<dyn Space>,
    right: Arc<dyn Space>,
    scale: f64,
    policy: NumericPolicy,
}

impl ScaledProductSpace {
    pub fn new(left: Arc<dyn Space>, right: Arc<dyn Space>, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(GeomError::Configuration(format!("product scale {scale} must be > 0")));
        }
        let policy = *left.policy();
        Ok(ScaledProductSpace {
            id: SpaceId::fresh(),
            left,
            right,
            scale,
            policy,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn left(&self) -> &Arc<dyn Space> {
        &self.left
    }

    pub fn right(&self) -> &Arc<dyn Space> {
        &self.right
    }

    pub fn pair(&self, a: Point, b: Point) -> Result<Point> {
        self.left.validate(&a)?;
        self.right.validate(&b)?;
        Ok(Point::new(self.id, Coords::Pair(Box::new(a), Box::new(b))))
    }

    pub fn parts<'p>(&self, p: &'p Point) -> Result<(&'p Point, &'p Point)> {
        p.check_space(self.id)?;
        match p.coords() {
            Coords::Pair(a, b) => Ok((a, b)),
            _ => Err(GeomError::Domain("expected pair coordinates".into())),
        }
    }
}

impl Space for ScaledProductSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::ScaledProduct
    }

    fn curvature_bound(&self) -> f64 {
        self.left.curvature_bound().max(self.right.curvature_bound()).max(0.0) / (self.scale * self.scale)
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some(self.scale * self.left.diameter_bound()?.hypot(self.right.diameter_bound()?))
    }

    fn uniqueness_radius(&self) -> f64 {
        self.scale * self.left.uniqueness_radius().min(self.right.uniqueness_radius())
    }

    fn capabilities(&self) -> Capabilities {
        let (l, r) = (self.left.capabilities(), self.right.capabilities());
        Capabilities {
            has_exp_log: false,
            has_exact_geodesics: l.has_exact_geodesics && r.has_exact_geodesics,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let (a, b) = self.parts(p)?;
        self.left.validate(a)?;
        self.right.validate(b)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let (a1, b1) = self.parts(x)?;
        let (a2, b2) = self.parts(y)?;
        Ok(self.scale * self.left.distance(a1, a2)?.hypot(self.right.distance(b1, b2)?))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (a1, b1) = self.parts(x)?;
        let (a2, b2) = self.parts(y)?;
        let a = self.left.geodesic_point(a1, a2, s)?;
        let b = self.right.geodesic_point(b1, b2, s)?;
        Ok(Point::new(self.id, Coords::Pair(Box::new(a), Box::new(b))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SphereSpace;

    #[test]
    fn same_left_factor_scales_right_distance() {
        let s = Arc::new(SphereSpace::unit(2));
        let c = 1.0 / 2f64.sqrt();
        let prod = ScaledProductSpace::new(s.clone(), s.clone(), c).unwrap();
        let a = s.from_angles(0.3, 0.1).unwrap();
        let b = s.from_angles(0.5, 1.0).unwrap();
        let b2 = s.from_angles(1.1, 2.0).unwrap();
        let x = prod.pair(a.clone(), b.clone()).unwrap();
        let y = prod.pair(a, b2.clone()).unwrap();
        assert_eq!(prod.distance(&x, &y).unwrap(), c * s.distance(&b, &b2).unwrap());
    }
}
