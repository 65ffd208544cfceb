use std::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Point, Space, SpaceId, SpaceKind, TangentVector};
use crate::policy::NumericPolicy;
use crate::vecmath::{self, Coord};

/// Round sphere of dimension `m` and radius `R`, realised as the vectors of
/// norm `R` in ℝ^{m+1}. Curvature is `1/R²`.
#[derive(Debug, Clone)]
pub struct SphereSpace {
    id: SpaceId,
    dim: usize,
    radius: f64,
    policy: NumericPolicy,
}

impl SphereSpace {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 || !(radius > 0.0) || !radius.is_finite() {
            return Err(GeomError::Configuration(format!(
                "sphere needs dim >= 1 and radius > 0, got dim {dim}, radius {radius}"
            )));
        }
        Ok(SphereSpace {
            id: SpaceId::fresh(),
            dim,
            radius,
            policy: NumericPolicy::default(),
        })
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(dim, 1.0).expect("unit sphere parameters are valid")
    }

    pub fn with_policy(mut self, policy: NumericPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    /// Point with the given ambient coordinates; the norm must equal `R`.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        self.check_len(coords)?;
        let n = vecmath::norm(coords);
        if (n - self.radius).abs() > self.policy.membership_tol * self.radius.max(1.0) {
            return Err(GeomError::Domain(format!(
                "sphere point must have norm {}, got {n}",
                self.radius
            )));
        }
        Ok(self.raw(vecmath::scale(self.radius / n, coords)))
    }

    /// Radial projection of a nonzero vector onto the sphere.
    pub fn point_normalized(&self, coords: &[f64]) -> Result<Point> {
        self.check_len(coords)?;
        let n = vecmath::norm(coords);
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeomError::Domain("cannot normalise a zero vector".into()));
        }
        Ok(self.raw(vecmath::scale(self.radius / n, coords)))
    }

    /// Point at colatitude `theta` and longitude `phi` (2-sphere only):
    /// `R·(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(&self, theta: f64, phi: f64) -> Result<Point> {
        if self.dim != 2 {
            return Err(GeomError::Domain("angular coordinates need a 2-sphere".into()));
        }
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        self.point_normalized(&[st * cp, st * sp, ct])
    }

    /// North pole `R·e_{m+1}`.
    pub fn pole(&self) -> Point {
        let mut v: Coord = smallvec::smallvec![0.0; self.dim + 1];
        v[self.dim] = self.radius;
        self.raw(v)
    }

    pub(crate) fn raw(&self, v: Coord) -> Point {
        Point::vector(self.id, v)
    }

    fn check_len(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dim + 1 {
            return Err(GeomError::Domain(format!(
                "expected {} ambient coordinates, got {}",
                self.dim + 1,
                coords.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn coords<'p>(&self, p: &'p Point) -> Result<&'p [f64]> {
        p.check_space(self.id)?;
        p.expect_vector()
    }

    /// Angle at the centre between two points.
    pub(crate) fn angle(&self, x: &[f64], y: &[f64]) -> f64 {
        vecmath::angle(x, y)
    }

    fn renormalized(&self, v: Coord) -> Point {
        let n = vecmath::norm(&v);
        self.raw(v.iter().map(|x| x * self.radius / n).collect())
    }
}

impl Space for SphereSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Sphere
    }

    fn curvature_bound(&self) -> f64 {
        1.0 / (self.radius * self.radius)
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some(PI * self.radius)
    }

    fn uniqueness_radius(&self) -> f64 {
        PI * self.radius
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
        let v = self.coords(p)?;
        self.check_len(v)?;
        let n = vecmath::norm(v);
        if (n - self.radius).abs() > self.policy.membership_tol * self.radius.max(1.0) {
            return Err(GeomError::Domain(format!("norm {n} differs from radius {}", self.radius)));
        }
        Ok(())
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let (a, b) = (self.coords(x)?, self.coords(y)?);
        Ok(self.radius * self.angle(a, b))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (a, b) = (self.coords(x)?, self.coords(y)?);
        if s == 0.0 {
            return Ok(x.clone());
        }
        if s == 1.0 {
            return Ok(y.clone());
        }
        let theta = self.angle(a, b);
        self.check_unique(theta * self.radius)?;
        if theta < 1e-12 {
            return Ok(self.renormalized(vecmath::axpby(1.0 - s, a, s, b)));
        }
        let st = theta.sin();
        let wa = ((1.0 - s) * theta).sin() / st;
        let wb = (s * theta).sin() / st;
        Ok(self.renormalized(vecmath::axpby(wa, a, wb, b)))
    }

    fn log_map(&self, p: &Point, q: &Point) -> Result<TangentVector> {
        let (a, b) = (self.coords(p)?, self.coords(q)?);
        let theta = self.angle(a, b);
        if theta == 0.0 {
            return Ok(TangentVector::zero(p.clone()));
        }
        self.check_unique(theta * self.radius)?;
        let c = vecmath::dot(a, b) / (self.radius * self.radius);
        let u = vecmath::axpby(1.0, b, -c, a);
        let nu = vecmath::norm(&u);
        if nu == 0.0 {
            return Err(GeomError::NonUniqueGeodesic {
                distance: theta * self.radius,
                radius: self.uniqueness_radius(),
            });
        }
        Ok(TangentVector {
            base: p.clone(),
            direction: u.iter().map(|x| x / nu).collect(),
            magnitude: theta * self.radius,
        })
    }

    fn exp_map(&self, p: &Point, v: &TangentVector) -> Result<Point> {
        let a = self.coords(p)?;
        v.base.check_space(self.id)?;
        if v.magnitude == 0.0 {
            return Ok(p.clone());
        }
        let ang = v.magnitude / self.radius;
        let (s, c) = ang.sin_cos();
        Ok(self.renormalized(vecmath::axpby(c, a, self.radius * s, &v.direction)))
    }

    fn tangent_basis(&self, p: &Point) -> Result<Vec<TangentVector>> {
        let a = self.coords(p)?;
        Ok(vecmath::complement_basis(a)
            .into_iter()
            .map(|e| TangentVector {
                base: p.clone(),
                direction: e,
                magnitude: 1.0,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn pole_to_equator_is_quarter_circle() {
        let s = SphereSpace::unit(2);
        let n = s.point(&[0.0, 0.0, 1.0]).unwrap();
        let e = s.point(&[1.0, 0.0, 0.0]).unwrap();
        assert!((s.distance(&n, &e).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(s.distance(&n, &n).unwrap(), 0.0);
    }

    #[test]
    fn midpoint_by_symmetry() {
        let s = SphereSpace::unit(2);
        let x = s.point(&[1.0, 0.0, 0.0]).unwrap();
        let y = s.point(&[0.0, 1.0, 0.0]).unwrap();
        let m = s.geodesic_point(&x, &y, 0.5).unwrap();
        let h = 0.5f64.sqrt();
        let v = m.as_slice().unwrap();
        assert!((v[0] - h).abs() < 1e-15 && (v[1] - h).abs() < 1e-15 && v[2].abs() < 1e-15);
        assert_eq!(s.geodesic_point(&x, &y, 0.0).unwrap(), x);
    }

    #[test]
    fn antipodes_have_no_unique_geodesic() {
        let s = SphereSpace::unit(2);
        let x = s.point(&[0.0, 0.0, 1.0]).unwrap();
        let y = s.point(&[0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(
            s.geodesic_point(&x, &y, 0.5),
            Err(GeomError::NonUniqueGeodesic { .. })
        ));
        assert!(s.log_map(&x, &y).is_err());
    }

    #[test]
    fn radial_clamp_onto_hemisphere() {
        let s = SphereSpace::unit(2);
        let c = s.pole();
        let x = s.from_angles(3.0 * PI / 4.0, 0.3).unwrap();
        let p = s.project_to_ball(&c, FRAC_PI_2, &x).unwrap();
        let expect = s.from_angles(FRAC_PI_2, 0.3).unwrap();
        assert!(s.distance(&p, &expect).unwrap() < 1e-14);
    }

    #[test]
    fn exp_quarter_turn_reaches_equator() {
        let s = SphereSpace::unit(2);
        let n = s.pole();
        let v = TangentVector {
            base: n.clone(),
            direction: smallvec::smallvec![0.0, 1.0, 0.0],
            magnitude: FRAC_PI_2,
        };
        let q = s.exp_map(&n, &v).unwrap();
        let e = s.point(&[0.0, 1.0, 0.0]).unwrap();
        assert!(s.distance(&q, &e).unwrap() < 1e-15);
        assert_eq!(s.exp_map(&n, &v.scale(0.0)).unwrap(), n);
    }

    #[test]
    fn scaled_sphere_metric() {
        let s = SphereSpace::new(2, 1.2).unwrap();
        let n = s.pole();
        let e = s.point(&[1.2, 0.0, 0.0]).unwrap();
        assert!((s.distance(&n, &e).unwrap() - 1.2 * FRAC_PI_2).abs() < 1e-14);
        assert!((s.curvature_bound() - 1.0 / 1.44).abs() < 1e-15);
        assert!(s.point(&[1.0, 0.0, 0.0]).is_err());
    }
}
