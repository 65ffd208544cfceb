use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::metric::{Point, Space};
use crate::spaces::SphereSpace;
use crate::tractrix::PointMap;
use crate::vecmath::{self, Coord};

/// A closed convex cone `K̊ ⊂ ℝ^{m+1}`; `K` is its trace on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSet {
    /// The ray through a unit vector (`K` a single point).
    Ray(Coord),
    /// The planar sector spanned by two unit vectors at angle below π
    /// (`K` a great-circle arc).
    Sector(Coord, Coord),
    /// `{x : angle(x, axis) <= half_angle}` with `half_angle < π/2`.
    Circular { axis: Coord, half_angle: f64 },
    /// `{x : <n_i, x> >= 0 for all i}`, projected by Dykstra's method.
    Halfspaces(Vec<Coord>),
}

const DYKSTRA_TOL: f64 = 1e-12;
const DYKSTRA_MAX_ITER: usize = 10_000;

fn unit(v: &[f64]) -> Result<Coord> {
    let n = vecmath::norm(v);
    if !(n > 0.0) || !n.is_finite() {
        return Err(GeomError::Domain("cone generator must be nonzero".into()));
    }
    Ok(vecmath::scale(1.0 / n, v))
}

fn ray_projection(x: &[f64], d: &[f64]) -> Coord {
    vecmath::scale(vecmath::dot(x, d).max(0.0), d)
}

impl ConeSet {
    pub fn ray(d: &[f64]) -> Result<Self> {
        Ok(ConeSet::Ray(unit(d)?))
    }

    pub fn sector(a: &[f64], b: &[f64]) -> Result<Self> {
        let (a, b) = (unit(a)?, unit(b)?);
        if vecmath::dot(&a, &b) <= -1.0 + 1e-12 {
            return Err(GeomError::Domain("sector generators must not be opposite".into()));
        }
        Ok(ConeSet::Sector(a, b))
    }

    pub fn circular(axis: &[f64], half_angle: f64) -> Result<Self> {
        if !(half_angle >= 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(GeomError::Domain(format!("half angle {half_angle} outside [0, π/2)")));
        }
        Ok(ConeSet::Circular {
            axis: unit(axis)?,
            half_angle,
        })
    }

    pub fn halfspaces(normals: &[Vec<f64>]) -> Result<Self> {
        if normals.is_empty() {
            return Err(GeomError::Domain("at least one halfspace is needed".into()));
        }
        Ok(ConeSet::Halfspaces(normals.iter().map(|n| unit(n)).collect::<Result<_>>()?))
    }

    /// Euclidean nearest point of the cone.
    pub fn nearest(&self, x: &[f64]) -> Result<Coord> {
        match self {
            ConeSet::Ray(d) => Ok(ray_projection(x, d)),
            ConeSet::Sector(a, b) => {
                // Orthonormal frame (a, e) of the plane; b = cos θ·a + sin θ·e.
                let c = vecmath::dot(a, b);
                let e = unit(&vecmath::axpby(1.0, b, -c, a))?;
                let theta = c.clamp(-1.0, 1.0).acos();
                let (xa, xe) = (vecmath::dot(x, a), vecmath::dot(x, &e));
                let phi = xe.atan2(xa);
                if phi >= 0.0 && phi <= theta {
                    return Ok(vecmath::axpby(xa, a, xe, &e));
                }
                let (pa, pb) = (ray_projection(x, a), ray_projection(x, b));
                Ok(if vecmath::dist(x, &pa) <= vecmath::dist(x, &pb) { pa } else { pb })
            }
            ConeSet::Circular { axis, half_angle } => {
                let s = vecmath::dot(x, axis);
                let w = vecmath::axpby(1.0, x, -s, axis);
                let rho = vecmath::norm(&w);
                let (sb, cb) = half_angle.sin_cos();
                if rho * cb <= s * sb {
                    return Ok(x.iter().copied().collect());
                }
                if rho == 0.0 {
                    // Straight below the tip: the cone tip is nearest.
                    return Ok(smallvec::smallvec![0.0; x.len()]);
                }
                let dir = vecmath::axpby(cb, axis, sb / rho, &w);
                Ok(ray_projection(x, &dir))
            }
            ConeSet::Halfspaces(normals) => dykstra(x, normals),
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(vecmath::dist(x, &self.nearest(x)?) <= tol)
    }

    /// Smallest `<k, p>` over unit vectors `k` of the cone, when it has a
    /// closed form.
    fn min_inner(&self, p: &[f64]) -> Option<f64> {
        match self {
            ConeSet::Ray(d) => Some(vecmath::dot(d, p)),
            ConeSet::Sector(a, b) => Some(vecmath::dot(a, p).min(vecmath::dot(b, p))),
            ConeSet::Circular { axis, half_angle } => {
                Some((vecmath::angle(axis, p) + half_angle).min(std::f64::consts::PI).cos())
            }
            ConeSet::Halfspaces(_) => None,
        }
    }
}

fn dykstra(x: &[f64], normals: &[Coord]) -> Result<Coord> {
    let mut y: Coord = x.iter().copied().collect();
    let mut incr: Vec<Coord> = vec![smallvec::smallvec![0.0; x.len()]; normals.len()];
    for _ in 0..DYKSTRA_MAX_ITER {
        let prev = y.clone();
        for (n, q) in normals.iter().zip(incr.iter_mut()) {
            let z = vecmath::axpby(1.0, &y, 1.0, q);
            let v = vecmath::dot(&z, n);
            let proj = if v >= 0.0 { z.clone() } else { vecmath::axpby(1.0, &z, -v, n) };
            *q = vecmath::sub(&z, &proj);
            y = proj;
        }
        if vecmath::dist(&prev, &y) <= DYKSTRA_TOL {
            return Ok(y);
        }
    }
    Err(GeomError::Consistency(format!(
        "alternating projection did not converge in {DYKSTRA_MAX_ITER} iterations"
    )))
}

/// `x ↦ x̂ + t_x·p` on the unit sphere `U = S^m ⊂ ℝ^{m+1}`, where `x̂` is the
/// nearest point of the cone over `K` and `t_x >= 0` solves `|x̂ + t·p| = 1`.
#[derive(Debug, Clone)]
pub struct ConeRetraction {
    sphere: Arc<SphereSpace>,
    set: ConeSet,
    p: Coord,
}

impl ConeRetraction {
    /// Needs `p ∈ K` and `<k, p> >= 0` for every `k ∈ K`; the second
    /// condition is checked in closed form except for halfspace cones, where
    /// it is checked at every evaluation instead.
    pub fn new(sphere: Arc<SphereSpace>, set: ConeSet, p: &Point) -> Result<Self> {
        if sphere.radius() != 1.0 {
            return Err(GeomError::Domain("cone retraction needs a unit sphere".into()));
        }
        sphere.validate(p)?;
        let pc: Coord = p.flat_coords().into_iter().collect();
        let tol = sphere.policy().abs_tol;
        if !set.contains(&pc, tol)? {
            return Err(GeomError::precondition("p must lie in K", format!("{:?}", pc.as_slice())));
        }
        if let Some(m) = set.min_inner(&pc) {
            if m < -tol {
                return Err(GeomError::precondition(
                    "K must lie in the closed hemisphere around p",
                    format!("min <k, p> = {m}"),
                ));
            }
        }
        Ok(ConeRetraction {
            sphere,
            set,
            p: pc,
        })
    }

    pub fn set(&self) -> &ConeSet {
        &self.set
    }

    pub fn sphere(&self) -> &Arc<SphereSpace> {
        &self.sphere
    }

    /// Whether `x` lies in `K` (to `tol`).
    pub fn in_k(&self, x: &Point, tol: f64) -> Result<bool> {
        self.sphere.validate(x)?;
        self.set.contains(&x.flat_coords(), tol)
    }
}

impl PointMap for ConeRetraction {
    fn source(&self) -> &dyn Space {
        &*self.sphere
    }

    fn target(&self) -> &dyn Space {
        &*self.sphere
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        self.sphere.validate(x)?;
        let tol = self.sphere.policy().abs_tol;
        let xh = self.set.nearest(&x.flat_coords())?;
        let c = vecmath::dot(&xh, &self.p);
        let n2 = vecmath::dot(&xh, &xh);
        if c < -tol || n2 > 1.0 + tol {
            return Err(GeomError::Consistency(format!(
                "no nonnegative root: <x̂, p> = {c}, |x̂|² = {n2}"
            )));
        }
        let t = -c + (c * c + (1.0 - n2).max(0.0)).sqrt();
        self.sphere.point_normalized(&vecmath::axpby(1.0, &xh, t, &self.p))
    }
}
