use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::metric::{Point, Space};
use crate::tractrix::PointMap;

/// Retraction of a CAT(1) space onto `B̄(p, π/2)`.
///
/// With `d = d(p, x)`: `x` itself when `d <= π/2`; the point at distance
/// `π - d` from `p` on the geodesic `[p x]` when `π/2 < d < π`; `p` when
/// `d >= π` or the geodesic is not unique.
pub fn radial_retraction(space: &dyn Space, p: &Point, x: &Point) -> Result<Point> {
    if space.curvature_bound() > 1.0 {
        return Err(GeomError::precondition(
            "radial retraction needs curvature at most 1",
            format!("κ = {}", space.curvature_bound()),
        ));
    }
    let d = space.distance(p, x)?;
    if d <= FRAC_PI_2 {
        return Ok(x.clone());
    }
    if d >= PI || space.check_unique(d).is_err() {
        return Ok(p.clone());
    }
    space.geodesic_point(p, x, (PI - d) / d)
}

/// [`radial_retraction`] about a fixed point.
#[derive(Debug, Clone)]
pub struct RadialMap {
    space: Arc<dyn Space>,
    p: Point,
}

impl RadialMap {
    pub fn new(space: Arc<dyn Space>, p: Point) -> Result<Self> {
        space.validate(&p)?;
        Ok(RadialMap { space, p })
    }
}

impl PointMap for RadialMap {
    fn source(&self) -> &dyn Space {
        &*self.space
    }

    fn target(&self) -> &dyn Space {
        &*self.space
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        radial_retraction(&*self.space, &self.p, x)
    }
}
