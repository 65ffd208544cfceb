use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::Arc;

use super::radial_retraction;
use crate::error::{GeomError, Result};
use crate::glued::{build_theorem1_space, DiagonalInterface, GluedSpace, Interface, Theorem1Space};
use crate::metric::{Point, Space};
use crate::spaces::{ScaledProductSpace, SphereSpace};
use crate::tractrix::{drive, DriveStats, DrivingCurve, Partition, PointMap};

/// Image of one point under the glued-space retraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiOutput {
    /// The image as a point of `U`.
    pub point: Point,
    /// The image as a point of `K`.
    pub k: Point,
    /// Distance from the flow's end point to `K` (zero up to rounding when
    /// the end point lies exactly on the unit slice).
    pub snap: f64,
}

/// `x ↦ φ_{π/2}(Θ(x))` in the space glued from `U` and the spherical cone
/// over `K`, read back as a point of `K`.
#[derive(Debug, Clone)]
pub struct PhiPipeline {
    space: Theorem1Space,
    gamma: DrivingCurve,
    part: Partition,
}

impl PhiPipeline {
    /// Builds the glued space with gate mesh `mesh` and the flow with step
    /// at most `delta`.
    pub fn new(
        u: Arc<dyn Space>,
        interface: Arc<dyn Interface>,
        p: Point,
        mesh: f64,
        delta: f64,
    ) -> Result<Self> {
        Self::from_space(build_theorem1_space(u, interface, p, mesh)?, delta)
    }

    pub fn from_space(space: Theorem1Space, delta: f64) -> Result<Self> {
        let th = space.clone();
        let gamma = DrivingCurve::from_fn(0.0, FRAC_PI_2, 1.0, move |t| th.driving_point(t))?;
        let part = Partition::with_step(0.0, FRAC_PI_2, delta)?;
        Ok(PhiPipeline { space, gamma, part })
    }

    /// Swaps in a differently configured glued space over the same `U` and
    /// `K` (crossing policy, refinement).
    pub fn with_glued(mut self, glued: GluedSpace) -> Result<Self> {
        self.space.glued = Arc::new(glued);
        Self::from_space(self.space, self.part.max_gap())
    }

    pub fn glued(&self) -> &Arc<GluedSpace> {
        &self.space.glued
    }

    pub fn theorem_space(&self) -> &Theorem1Space {
        &self.space
    }

    pub fn u(&self) -> &Arc<dyn Space> {
        self.space.glued.u()
    }

    /// Base point actually used (the nearest point of `K` if replaced).
    pub fn base(&self) -> &Point {
        &self.space.base
    }

    pub fn step(&self) -> f64 {
        self.part.max_gap()
    }

    /// Gate covering radius `ε_K`.
    pub fn mesh_error(&self) -> f64 {
        self.space.glued.gate_error_bound() / 2.0
    }

    /// Tolerance for the retraction property, `2δ + 2ε_K`.
    pub fn fixed_point_tolerance(&self) -> f64 {
        2.0 * self.step() + 2.0 * self.mesh_error()
    }

    /// Evaluates many points of `U` at once.
    pub fn evaluate_many(&self, xs: &[Point]) -> (Vec<Result<PhiOutput>>, DriveStats) {
        let w = &self.space.glued;
        let u = w.u();
        let starts: Vec<Result<Point>> = xs
            .iter()
            .map(|x| {
                u.validate(x)?;
                w.in_u(radial_retraction(&**u, &self.space.base, x)?)
            })
            .collect();
        let ok: Vec<Point> = starts.iter().filter_map(|s| s.as_ref().ok().cloned()).collect();
        let (ends, stats) = match drive(&**w, &self.gamma, FRAC_PI_2, &self.part, &ok, |_, _| {}) {
            Ok(r) => r,
            Err(e) => (ok.iter().map(|_| Err(e.clone())).collect(), DriveStats::default()),
        };
        let mut ends = ends.into_iter();
        let out = starts
            .into_iter()
            .map(|s| {
                s?;
                let end = ends.next().expect("one end point per start")?;
                let (k, snap) = w.to_interface(&end)?;
                Ok(PhiOutput {
                    point: w.interface().embed(&k)?,
                    k,
                    snap,
                })
            })
            .collect();
        (out, stats)
    }

    pub fn evaluate(&self, x: &Point) -> Result<PhiOutput> {
        self.evaluate_many(std::slice::from_ref(x)).0.remove(0)
    }

    /// Largest `d_U(Φ(k), k)` over the given points of `K` (as points of `U`).
    pub fn retraction_error(&self, ks: &[Point]) -> Result<f64> {
        let (out, _) = self.evaluate_many(ks);
        let mut worst: f64 = 0.0;
        for (k, o) in ks.iter().zip(out) {
            worst = worst.max(self.u().distance(k, &o?.point)?);
        }
        Ok(worst)
    }
}

impl PointMap for PhiPipeline {
    fn source(&self) -> &dyn Space {
        &**self.u()
    }

    fn target(&self) -> &dyn Space {
        &**self.u()
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        Ok(self.evaluate(x)?.point)
    }

    fn apply_many(&self, xs: &[Point]) -> Vec<Result<Point>> {
        self.evaluate_many(xs).0.into_iter().map(|o| o.map(|o| o.point)).collect()
    }
}

/// Retraction of `(1/√2)·(U × U)` onto its diagonal for a cap `U` of a unit
/// sphere: `(x, y) ↦ ι(x, y, π/4)` into `U ⋆ U ⊂ S^{2m+1}`, the glued-space
/// retraction onto the embedded diagonal there, then `z ↦ (z, z)`.
#[derive(Debug, Clone)]
pub struct PsiPipeline {
    base: Arc<SphereSpace>,
    product: Arc<ScaledProductSpace>,
    interface: Arc<DiagonalInterface>,
    phi: PhiPipeline,
}

impl PsiPipeline {
    /// `U = B̄(p, cap_radius)` with `cap_radius <= π/2`.
    pub fn new(base: Arc<SphereSpace>, p: Point, cap_radius: f64, mesh: f64, delta: f64) -> Result<Self> {
        let interface = Arc::new(DiagonalInterface::new(base.clone(), p.clone(), cap_radius)?);
        let product = Arc::new(ScaledProductSpace::new(base.clone(), base.clone(), FRAC_1_SQRT_2)?);
        let target: Arc<dyn Space> = interface.target().clone();
        let q = interface.embed(&p)?;
        let phi = PhiPipeline::new(target, interface.clone(), q, mesh, delta)?;
        Ok(PsiPipeline {
            base,
            product,
            interface,
            phi,
        })
    }

    pub fn product(&self) -> &Arc<ScaledProductSpace> {
        &self.product
    }

    pub fn base(&self) -> &Arc<SphereSpace> {
        &self.base
    }

    pub fn phi(&self) -> &PhiPipeline {
        &self.phi
    }

    pub fn pair(&self, x: Point, y: Point) -> Result<Point> {
        self.product.pair(x, y)
    }

    /// `ι(x, y, π/4)` realised in `S^{2m+1}`.
    pub fn embed(&self, xy: &Point) -> Result<Point> {
        let (x, y) = self.product.parts(xy)?;
        let tol = self.base.policy().abs_tol;
        for u in [x, y] {
            let d = self.base.distance(self.interface.center(), u)?;
            if d > self.interface.cap_radius() + tol {
                return Err(GeomError::precondition(
                    "point outside the cap U",
                    format!("{:?} at distance {d} from the centre", u.flat_coords()),
                ));
            }
        }
        let mut z = x.flat_coords();
        z.extend(y.flat_coords());
        let z: Vec<f64> = z.iter().map(|c| c * FRAC_1_SQRT_2).collect();
        self.interface.target().point_normalized(&z)
    }

    /// Images as diagonal pairs, with the snap distance of each.
    pub fn evaluate_many(&self, xs: &[Point]) -> (Vec<Result<(Point, f64)>>, DriveStats) {
        let embedded: Vec<Result<Point>> = xs.iter().map(|x| self.embed(x)).collect();
        let ok: Vec<Point> = embedded.iter().filter_map(|e| e.as_ref().ok().cloned()).collect();
        let (outs, stats) = self.phi.evaluate_many(&ok);
        let mut outs = outs.into_iter();
        let res = embedded
            .into_iter()
            .map(|e| {
                e?;
                let o = outs.next().expect("one output per input")?;
                Ok((self.product.pair(o.k.clone(), o.k)?, o.snap))
            })
            .collect();
        (res, stats)
    }
}

impl PointMap for PsiPipeline {
    fn source(&self) -> &dyn Space {
        &*self.product
    }

    fn target(&self) -> &dyn Space {
        &*self.product
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        self.apply_many(std::slice::from_ref(x)).remove(0)
    }

    fn apply_many(&self, xs: &[Point]) -> Vec<Result<Point>> {
        self.evaluate_many(xs).0.into_iter().map(|o| o.map(|o| o.0)).collect()
    }
}
