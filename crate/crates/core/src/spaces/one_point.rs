use crate::error::Result;
use crate::metric::{Capabilities, Point, Space, SpaceId, SpaceKind};
use crate::policy::NumericPolicy;

/// The one-point space `{s}`; the right factor of a spherical cone.
#[derive(Debug, Clone)]
pub struct OnePointSpace {
    id: SpaceId,
    policy: NumericPolicy,
}

impl OnePointSpace {
    pub fn new() -> Self {
        OnePointSpace {
            id: SpaceId::fresh(),
            policy: NumericPolicy::default(),
        }
    }

    pub fn point(&self) -> Point {
        Point::vector(self.id, smallvec::SmallVec::new())
    }
}

impl Default for OnePointSpace {
    fn default() -> Self {
        Self::new()
    }
}

impl Space for OnePointSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::OnePoint
    }

    fn curvature_bound(&self) -> f64 {
        0.0
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some(0.0)
    }

    fn uniqueness_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_exp_log: false,
            has_exact_geodesics: true,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        p.check_space(self.id)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        x.check_space(self.id)?;
        y.check_space(self.id)?;
        Ok(0.0)
    }

    fn geodesic_point(&self, x: &Point, y: &Point, _s: f64) -> Result<Point> {
        y.check_space(self.id)?;
        x.check_space(self.id)?;
        Ok(x.clone())
    }
}
