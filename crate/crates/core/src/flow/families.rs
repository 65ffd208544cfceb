use std::sync::Arc;

use super::TimeDependentFamily;
use crate::error::{GeomError, Result};
use crate::metric::{Point, Space, TangentVector};
use crate::spaces::EuclideanSpace;
use crate::tractrix::{collar_lambda, DrivingCurve};
use crate::vecmath::{self, Coord};

/// `f_t = -max{r, dist_{γ(t)}}` on `B(γ(t), r + collar)`.
#[derive(Clone)]
pub struct TractrixFamily {
    space: Arc<dyn Space>,
    gamma: DrivingCurve,
    r: f64,
    collar: f64,
    lambda: f64,
}

impl TractrixFamily {
    /// λ defaults to the concavity bound of `-dist` on the collar
    /// `[r, r + collar]`.
    pub fn new(space: Arc<dyn Space>, gamma: DrivingCurve, r: f64, collar: f64) -> Result<Self> {
        if !(r >= 0.0) || !(collar > 0.0) {
            return Err(GeomError::Configuration(format!(
                "tractrix family needs r >= 0 and collar > 0, got {r}, {collar}"
            )));
        }
        let lambda = collar_lambda(space.curvature_bound(), r, collar);
        Ok(TractrixFamily {
            space,
            gamma,
            r,
            collar,
            lambda,
        })
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn gamma(&self) -> &DrivingCurve {
        &self.gamma
    }
}

impl TimeDependentFamily for TractrixFamily {
    fn space(&self) -> &dyn Space {
        &*self.space
    }

    fn value(&self, t: f64, x: &Point) -> Result<f64> {
        let d = self.space.distance(x, &self.gamma.at(t)?)?;
        Ok(-d.max(self.r))
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Both `x ↦ f_t(x)` and `t ↦ f_t(x)` are 1-Lipschitz.
    fn lipschitz(&self) -> f64 {
        1.0
    }

    fn contains(&self, t: f64, x: &Point) -> Result<bool> {
        Ok(self.space.distance(x, &self.gamma.at(t)?)? < self.r + self.collar)
    }

    /// Zero inside the ball (including its boundary); the unit vector towards
    /// `γ(t)` outside.
    fn gradient(&self, t: f64, x: &Point) -> Result<TangentVector> {
        let g = self.gamma.at(t)?;
        let d = self.space.distance(x, &g)?;
        if d <= self.r {
            return Ok(TangentVector::zero(x.clone()));
        }
        let v = self.space.log_map(x, &g)?;
        Ok(TangentVector {
            magnitude: 1.0,
            ..v
        })
    }
}

/// `f(x) = -|x - c|²/2 + shift` on the ball `|x| <= radius` of ℝⁿ; λ = -1.
#[derive(Debug, Clone)]
pub struct QuadraticFamily {
    space: Arc<EuclideanSpace>,
    center: Coord,
    radius: f64,
    shift: f64,
}

impl QuadraticFamily {
    pub fn new(space: Arc<EuclideanSpace>, center: &[f64], radius: f64) -> Result<Self> {
        space.point(center)?;
        if !(radius > 0.0) {
            return Err(GeomError::Configuration(format!("domain radius {radius} must be > 0")));
        }
        Ok(QuadraticFamily {
            space,
            center: center.iter().copied().collect(),
            radius,
            shift: 0.0,
        })
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// Upper bound on `sup |f - g|` over the domain for another quadratic on the same
    /// domain.
    pub fn sup_difference(&self, other: &QuadraticFamily) -> f64 {
        // f - g = <x, c - c'> - (|c|² - |c'|²)/2 + shift - shift'.
        let dc = vecmath::sub(&self.center, &other.center);
        let konst = -0.5 * (vecmath::dot(&self.center, &self.center)
            - vecmath::dot(&other.center, &other.center))
            + self.shift
            - other.shift;
        self.radius * vecmath::norm(&dc) + konst.abs()
    }

    /// Exact flow `c + (x - c)·e^{-t}`.
    pub fn exact(&self, x: &Point, t: f64) -> Result<Point> {
        x.check_space(self.space.id())?;
        let v = x.expect_vector()?;
        let e = (-t).exp();
        self.space.point(&vecmath::axpby(1.0 - e, &self.center, e, v))
    }
}

impl TimeDependentFamily for QuadraticFamily {
    fn space(&self) -> &dyn Space {
        &*self.space
    }

    fn value(&self, _t: f64, x: &Point) -> Result<f64> {
        x.check_space(self.space.id())?;
        let d = vecmath::dist(x.expect_vector()?, &self.center);
        Ok(-0.5 * d * d + self.shift)
    }

    fn lambda(&self) -> f64 {
        -1.0
    }

    fn lipschitz(&self) -> f64 {
        self.radius + vecmath::norm(&self.center)
    }

    fn contains(&self, _t: f64, x: &Point) -> Result<bool> {
        x.check_space(self.space.id())?;
        Ok(vecmath::norm(x.expect_vector()?) <= self.radius)
    }

    fn gradient(&self, _t: f64, x: &Point) -> Result<TangentVector> {
        x.check_space(self.space.id())?;
        let v = vecmath::sub(&self.center, x.expect_vector()?);
        Ok(TangentVector::from_ambient(x.clone(), &v))
    }
}

/// `h_t = f_t + s`: same gradient curves, values shifted by `s`.
#[derive(Clone)]
pub struct ShiftedFamily {
    inner: Arc<dyn TimeDependentFamily>,
    shift: f64,
}

impl ShiftedFamily {
    pub fn new(inner: Arc<dyn TimeDependentFamily>, shift: f64) -> Self {
        ShiftedFamily { inner, shift }
    }
}

impl TimeDependentFamily for ShiftedFamily {
    fn space(&self) -> &dyn Space {
        self.inner.space()
    }

    fn value(&self, t: f64, x: &Point) -> Result<f64> {
        Ok(self.inner.value(t, x)? + self.shift)
    }

    fn lambda(&self) -> f64 {
        self.inner.lambda()
    }

    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz()
    }

    fn contains(&self, t: f64, x: &Point) -> Result<bool> {
        self.inner.contains(t, x)
    }

    fn gradient(&self, t: f64, x: &Point) -> Result<TangentVector> {
        self.inner.gradient(t, x)
    }
}
