use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Point, Space, SpaceId, SpaceKind, TangentVector};
use crate::policy::NumericPolicy;
use crate::vecmath::{self, Coord};

/// Euclidean space ℝⁿ.
#[derive(Debug, Clone)]
pub struct EuclideanSpace {
    id: SpaceId,
    dim: usize,
    policy: NumericPolicy,
}

impl EuclideanSpace {
    pub fn new(dim: usize) -> Self {
        EuclideanSpace {
            id: SpaceId::fresh(),
            dim,
            policy: NumericPolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: NumericPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.dim {
            return Err(GeomError::Domain(format!(
                "expected {} coordinates, got {}",
                self.dim,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::Domain("non-finite coordinate".into()));
        }
        Ok(Point::vector(self.id, Coord::from_slice(coords)))
    }

    pub fn origin(&self) -> Point {
        Point::vector(self.id, smallvec::smallvec![0.0; self.dim])
    }

    fn coords<'p>(&self, p: &'p Point) -> Result<&'p [f64]> {
        p.check_space(self.id)?;
        p.expect_vector()
    }
}

impl Space for EuclideanSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Euclidean
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
            has_exp_log: true,
            has_exact_geodesics: true,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let v = self.coords(p)?;
        if v.len() != self.dim {
            return Err(GeomError::Domain(format!("expected {} coordinates", self.dim)));
        }
        Ok(())
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(vecmath::dist(self.coords(x)?, self.coords(y)?))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (a, b) = (self.coords(x)?, self.coords(y)?);
        if s == 0.0 {
            return Ok(x.clone());
        }
        if s == 1.0 {
            return Ok(y.clone());
        }
        Ok(Point::vector(self.id, vecmath::axpby(1.0 - s, a, s, b)))
    }

    fn log_map(&self, p: &Point, q: &Point) -> Result<TangentVector> {
        let diff = vecmath::sub(self.coords(q)?, self.coords(p)?);
        Ok(TangentVector::from_ambient(p.clone(), &diff))
    }

    fn exp_map(&self, p: &Point, v: &TangentVector) -> Result<Point> {
        let a = self.coords(p)?;
        v.base.check_space(self.id)?;
        if v.magnitude == 0.0 {
            return Ok(p.clone());
        }
        Ok(Point::vector(self.id, vecmath::axpby(1.0, a, v.magnitude, &v.direction)))
    }

    fn tangent_basis(&self, p: &Point) -> Result<Vec<TangentVector>> {
        self.validate(p)?;
        Ok((0..self.dim)
            .map(|i| {
                let mut e: Coord = smallvec::smallvec![0.0; self.dim];
                e[i] = 1.0;
                TangentVector {
                    base: p.clone(),
                    direction: e,
                    magnitude: 1.0,
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interpolation() {
        let e = EuclideanSpace::new(2);
        let x = e.point(&[0.0, 0.0]).unwrap();
        let y = e.point(&[2.0, 2.0]).unwrap();
        let m = e.geodesic_point(&x, &y, 0.25).unwrap();
        assert_eq!(m.as_slice().unwrap(), &[0.5, 0.5]);
    }

    #[test]
    fn clamp_onto_unit_ball() {
        let e = EuclideanSpace::new(1);
        let c = e.point(&[0.0]).unwrap();
        let x = e.point(&[3.0]).unwrap();
        let p = e.project_to_ball(&c, 1.0, &x).unwrap();
        assert!((p.as_slice().unwrap()[0] - 1.0).abs() < 1e-15);
        let inside = e.point(&[0.4]).unwrap();
        assert_eq!(e.project_to_ball(&c, 1.0, &inside).unwrap(), inside);
    }

    #[test]
    fn log_is_difference() {
        let e = EuclideanSpace::new(3);
        let p = e.point(&[1.0, 2.0, 3.0]).unwrap();
        let q = e.point(&[2.0, 0.0, 3.0]).unwrap();
        let v = e.log_map(&p, &q).unwrap();
        let amb = v.ambient();
        assert!((amb[0] - 1.0).abs() < 1e-15 && (amb[1] + 2.0).abs() < 1e-15 && amb[2].abs() < 1e-15);
        let back = e.exp_map(&p, &v).unwrap();
        assert!(e.distance(&back, &q).unwrap() < 1e-14);
    }

    #[test]
    fn mismatched_space_is_rejected() {
        let a = EuclideanSpace::new(2);
        let b = EuclideanSpace::new(2);
        let x = a.point(&[0.0, 0.0]).unwrap();
        let y = b.point(&[0.0, 0.0]).unwrap();
        assert!(matches!(a.distance(&x, &y), Err(GeomError::SpaceMismatch { .. })));
    }
}
