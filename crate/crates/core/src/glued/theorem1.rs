use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::{GluedSpace, Interface};
use crate::error::{GeomError, Result};
use crate::metric::{Point, Space};

/// The glued space `W = U ∪_K J` together with the unit-speed geodesic `γ`
/// from the base point to the tip, `γ(t) = (p, π/2 - t)`.
#[derive(Debug, Clone)]
pub struct Theorem1Space {
    pub glued: Arc<GluedSpace>,
    /// Base point in `U` actually used (the nearest point of `K` when the
    /// given point was replaced).
    pub base: Point,
    /// The base point as a point of `K`.
    pub base_k: Point,
    /// Whether the given point was off `K` and replaced by its nearest point.
    pub replaced: bool,
}

impl Theorem1Space {
    /// `γ(t)` for `t ∈ [0, π/2]`.
    pub fn driving_point(&self, t: f64) -> Result<Point> {
        let tol = self.glued.policy().membership_tol;
        if !(t >= -tol && t <= FRAC_PI_2 + tol) {
            return Err(GeomError::Domain(format!("driving parameter {t} outside [0, π/2]")));
        }
        self.glued.cone_point(self.base_k.clone(), FRAC_PI_2 - t.clamp(0.0, FRAC_PI_2))
    }

    pub fn driving_length(&self) -> f64 {
        FRAC_PI_2
    }
}

/// Glues the spherical cone over `K` to `U` and sets up the driving geodesic.
///
/// Requires every gate of `K` within `π/2` of `p`. A base point off `K` is
/// accepted only when `U` has curvature below 1, in which case it is replaced
/// by its nearest point of `K`.
pub fn build_theorem1_space(
    u: Arc<dyn Space>,
    interface: Arc<dyn Interface>,
    p: Point,
    mesh: f64,
) -> Result<Theorem1Space> {
    u.validate(&p)?;
    let glued = GluedSpace::new(u.clone(), interface.clone(), mesh)?;
    let tol = u.policy().abs_tol;
    check_within_quarter(&glued, &p, tol)?;

    let k_near = interface.nearest(&p)?;
    let near_u = interface.embed(&k_near)?;
    let off = u.distance(&p, &near_u)?;
    let replaced = off > tol;
    if replaced {
        if u.curvature_bound() >= 1.0 {
            return Err(GeomError::precondition(
                "base point must lie in K when the curvature bound is 1",
                format!("distance {off} from K, nearest point {:?}", near_u.flat_coords()),
            ));
        }
        check_within_quarter(&glued, &near_u, tol)?;
    }
    let base = if replaced { near_u } else { p };
    Ok(Theorem1Space {
        glued: Arc::new(glued),
        base,
        base_k: k_near,
        replaced,
    })
}

fn check_within_quarter(glued: &GluedSpace, p: &Point, tol: f64) -> Result<()> {
    for (i, g) in glued.gates().iter().enumerate() {
        let d = glued.u().distance(p, &g.in_u)?;
        if d > FRAC_PI_2 + tol {
            return Err(GeomError::precondition(
                "K must lie within π/2 of the base point",
                format!("gate {i} at {:?} is at distance {d}", g.in_u.flat_coords()),
            ));
        }
    }
    Ok(())
}
