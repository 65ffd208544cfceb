//! Seeded samplers for points and point pairs.
//!
//! All randomness goes through [`Rng`], ChaCha8 seeded with
//! `SeedableRng::seed_from_u64`, so a seed reproduces a run on any platform.

use std::sync::Arc;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GeomError, Result};
use crate::metric::{Point, Space, TangentVector};
use crate::spaces::{EuclideanSpace, ScaledProductSpace, SphereSpace};
use crate::vecmath::{self, Coord};

pub type Rng = ChaCha8Rng;

/// Name recorded in run manifests.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64";

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub trait PointSampler: Send + Sync {
    fn space(&self) -> &dyn Space;

    fn sample(&self, rng: &mut Rng) -> Result<Point>;

    /// A random point of the domain within distance `h` of `x`.
    fn perturb(&self, x: &Point, h: f64, rng: &mut Rng) -> Result<Point>;
}

fn gaussian(n: usize, rng: &mut Rng) -> Coord {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Uniform samples of the closed cap `B̄(center, radius)` of a sphere.
#[derive(Debug, Clone)]
pub struct CapSampler {
    sphere: Arc<SphereSpace>,
    center: Point,
    radius: f64,
}

impl CapSampler {
    pub fn new(sphere: Arc<SphereSpace>, center: Point, radius: f64) -> Result<Self> {
        sphere.validate(&center)?;
        if !(radius > 0.0) || radius > sphere.uniqueness_radius() {
            return Err(GeomError::Configuration(format!("cap radius {radius} out of range")));
        }
        Ok(CapSampler {
            sphere,
            center,
            radius,
        })
    }

    pub fn sphere(&self) -> &Arc<SphereSpace> {
        &self.sphere
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn inside(&self, x: &Point) -> Result<bool> {
        Ok(self.sphere.distance(&self.center, x)? <= self.radius)
    }

    fn clamp(&self, x: Point) -> Result<Point> {
        if self.inside(&x)? {
            return Ok(x);
        }
        self.sphere.project_to_ball(&self.center, self.radius, &x)
    }

    fn random_tangent(&self, at: &Point, rng: &mut Rng) -> Result<TangentVector> {
        let c = self.sphere.coords(at)?;
        let g = gaussian(c.len(), rng);
        let rr = self.sphere.radius() * self.sphere.radius();
        let along = vecmath::dot(&g, c) / rr;
        let v = vecmath::axpby(1.0, &g, -along, c);
        Ok(TangentVector::from_ambient(at.clone(), &v))
    }
}

impl PointSampler for CapSampler {
    fn space(&self) -> &dyn Space {
        &*self.sphere
    }

    /// On 2-spheres the colatitude is drawn by inverting the area CDF; in
    /// other dimensions Gaussian directions are rejected outside the cap.
    fn sample(&self, rng: &mut Rng) -> Result<Point> {
        let big_r = self.sphere.radius();
        let alpha = self.radius / big_r;
        let c = self.sphere.coords(&self.center)?;
        if self.sphere.dim() == 2 {
            let u: f64 = rng.gen();
            let cos_t = 1.0 - u * (1.0 - alpha.cos());
            let theta = cos_t.clamp(-1.0, 1.0).acos();
            let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let basis = vecmath::complement_basis(c);
            let dir = vecmath::axpby(phi.cos(), &basis[0], phi.sin(), &basis[1]);
            let unit_c = vecmath::scale(1.0 / big_r, c);
            let v = vecmath::axpby(theta.cos(), &unit_c, theta.sin(), &dir);
            return self.sphere.point_normalized(&v);
        }
        for _ in 0..1_000_000 {
            let g = gaussian(c.len(), rng);
            if vecmath::norm(&g) == 0.0 {
                continue;
            }
            let x = self.sphere.point_normalized(&g)?;
            if self.inside(&x)? {
                return Ok(x);
            }
        }
        Err(GeomError::Configuration("cap too small for rejection sampling".into()))
    }

    fn perturb(&self, x: &Point, h: f64, rng: &mut Rng) -> Result<Point> {
        let v = self.random_tangent(x, rng)?;
        let len = h * rng.gen::<f64>();
        let y = self.sphere.exp_map(x, &TangentVector { magnitude: len, ..v })?;
        self.clamp(y)
    }
}

/// Uniform samples of a closed Euclidean ball.
#[derive(Debug, Clone)]
pub struct BallSampler {
    space: Arc<EuclideanSpace>,
    center: Coord,
    radius: f64,
}

impl BallSampler {
    pub fn new(space: Arc<EuclideanSpace>, center: &[f64], radius: f64) -> Result<Self> {
        space.point(center)?;
        if !(radius > 0.0) {
            return Err(GeomError::Configuration(format!("ball radius {radius} must be > 0")));
        }
        Ok(BallSampler {
            space,
            center: center.iter().copied().collect(),
            radius,
        })
    }

    fn clamp(&self, v: Coord) -> Result<Point> {
        let d = vecmath::sub(&v, &self.center);
        let n = vecmath::norm(&d);
        if n <= self.radius {
            return self.space.point(&v);
        }
        self.space.point(&vecmath::axpby(1.0, &self.center, self.radius / n, &d))
    }
}

impl PointSampler for BallSampler {
    fn space(&self) -> &dyn Space {
        &*self.space
    }

    fn sample(&self, rng: &mut Rng) -> Result<Point> {
        let n = self.center.len();
        let g = gaussian(n, rng);
        let ng = vecmath::norm(&g).max(f64::MIN_POSITIVE);
        let rad = self.radius * rng.gen::<f64>().powf(1.0 / n as f64);
        self.clamp(vecmath::axpby(1.0, &self.center, rad / ng, &g))
    }

    fn perturb(&self, x: &Point, h: f64, rng: &mut Rng) -> Result<Point> {
        x.check_space(self.space.id())?;
        let v = x.expect_vector()?;
        let g = gaussian(v.len(), rng);
        let ng = vecmath::norm(&g).max(f64::MIN_POSITIVE);
        let len = h * rng.gen::<f64>();
        self.clamp(vecmath::axpby(1.0, v, len / ng, &g))
    }
}

/// Pairs `(a, b)` with independent factor samplers.
pub struct ProductSampler {
    space: Arc<ScaledProductSpace>,
    left: Arc<dyn PointSampler>,
    right: Arc<dyn PointSampler>,
}

impl ProductSampler {
    pub fn new(
        space: Arc<ScaledProductSpace>,
        left: Arc<dyn PointSampler>,
        right: Arc<dyn PointSampler>,
    ) -> Self {
        ProductSampler { space, left, right }
    }
}

impl PointSampler for ProductSampler {
    fn space(&self) -> &dyn Space {
        &*self.space
    }

    fn sample(&self, rng: &mut Rng) -> Result<Point> {
        let a = self.left.sample(rng)?;
        let b = self.right.sample(rng)?;
        self.space.pair(a, b)
    }

    fn perturb(&self, x: &Point, h: f64, rng: &mut Rng) -> Result<Point> {
        let (a, b) = self.space.parts(x)?;
        let a2 = self.left.perturb(a, h, rng)?;
        let b2 = self.right.perturb(b, h, rng)?;
        self.space.pair(a2, b2)
    }
}

/// How sampled pairs relate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairMode {
    Independent,
    /// Second point within `scale` of the first.
    Local { scale: f64 },
    /// Alternating independent and local pairs.
    Mixed { scale: f64 },
}

pub fn sample_pairs(
    sampler: &dyn PointSampler,
    mode: PairMode,
    n: usize,
    rng: &mut Rng,
) -> Result<Vec<(Point, Point)>> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = sampler.sample(rng)?;
        let local = match mode {
            PairMode::Independent => None,
            PairMode::Local { scale } => Some(scale),
            PairMode::Mixed { scale } => (i % 2 == 1).then_some(scale),
        };
        let y = match local {
            Some(h) => sampler.perturb(&x, h, rng)?,
            None => sampler.sample(rng)?,
        };
        out.push((x, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn same_seed_same_stream() {
        let s = Arc::new(SphereSpace::unit(2));
        let cap = CapSampler::new(s.clone(), s.pole(), FRAC_PI_2).unwrap();
        let a = sample_pairs(&cap, PairMode::Mixed { scale: 0.1 }, 20, &mut rng(7)).unwrap();
        let b = sample_pairs(&cap, PairMode::Mixed { scale: 0.1 }, 20, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        let c = sample_pairs(&cap, PairMode::Mixed { scale: 0.1 }, 20, &mut rng(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cap_samples_stay_in_cap() {
        for dim in [2, 3] {
            let s = Arc::new(SphereSpace::new(dim, 1.2).unwrap());
            let cap = CapSampler::new(s.clone(), s.pole(), 1.0).unwrap();
            let mut r = rng(1);
            for (x, y) in sample_pairs(&cap, PairMode::Local { scale: 0.3 }, 200, &mut r).unwrap() {
                assert!(s.distance(&s.pole(), &x).unwrap() <= 1.0 + 1e-12);
                assert!(s.distance(&s.pole(), &y).unwrap() <= 1.0 + 1e-12);
                assert!(s.distance(&x, &y).unwrap() <= 0.3 + 1e-12);
            }
        }
    }

    #[test]
    fn cap_sampling_is_area_uniform() {
        let s = Arc::new(SphereSpace::unit(2));
        let cap = CapSampler::new(s.clone(), s.pole(), FRAC_PI_2).unwrap();
        let mut r = rng(3);
        let n = 20_000;
        let mut upper = 0;
        for _ in 0..n {
            let x = cap.sample(&mut r).unwrap();
            if x.as_slice().unwrap()[2] > 0.5 {
                upper += 1;
            }
        }
        // Half the hemisphere's area lies above height 1/2.
        let frac = upper as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    #[test]
    fn ball_samples_stay_in_ball() {
        let e = Arc::new(EuclideanSpace::new(3));
        let b = BallSampler::new(e.clone(), &[1.0, 0.0, 0.0], 2.0).unwrap();
        let c = e.point(&[1.0, 0.0, 0.0]).unwrap();
        let mut r = rng(5);
        for (x, y) in sample_pairs(&b, PairMode::Mixed { scale: 0.5 }, 100, &mut r).unwrap() {
            assert!(e.distance(&c, &x).unwrap() <= 2.0 + 1e-12);
            assert!(e.distance(&c, &y).unwrap() <= 2.0 + 1e-12);
        }
    }
}
