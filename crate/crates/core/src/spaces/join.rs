use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::{cone_law_sq, OnePointSpace, SphereSpace};
use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Coords, Point, Space, SpaceId, SpaceKind};
use crate::policy::NumericPolicy;
use crate::vecmath::{self, Coord};

/// Spherical join `U ⋆ V` of two spaces of diameter at most π.
///
/// A point `ι(u, v, t)` with `t ∈ [0, π/2]` sits at angle `π/2 - t` from the
/// copy of `U` (`t = π/2`) and at angle `t` from the copy of `V` (`t = 0`):
///
/// `cos |ι(u₁,v₁,t₁) ι(u₂,v₂,t₂)| = sin t₁ sin t₂ cos|u₁u₂| + cos t₁ cos t₂ cos|v₁v₂|`.
#[derive(Debug, Clone)]
pub struct SphericalJoinSpace {
    id: SpaceId,
    left: Arc<dyn Space>,
    right: Arc<dyn Space>,
    spheres: Option<(Arc<SphereSpace>, Arc<SphereSpace>)>,
    tip: Option<Arc<OnePointSpace>>,
    policy: NumericPolicy,
}

/// Spherical cone `K ⋆ {s}` over `K`: `t = 0` is the tip `s`, `t = π/2` the
/// copy of `K`.
pub fn spherical_cone(k: Arc<dyn Space>) -> Result<SphericalJoinSpace> {
    let tip = Arc::new(OnePointSpace::new());
    let mut join = SphericalJoinSpace::new(k, tip.clone())?;
    join.tip = Some(tip);
    Ok(join)
}

impl SphericalJoinSpace {
    pub fn new(left: Arc<dyn Space>, right: Arc<dyn Space>) -> Result<Self> {
        let policy = *left.policy();
        for (name, f) in [("left", &left), ("right", &right)] {
            match f.diameter_bound() {
                Some(d) if d <= PI + policy.abs_tol => {}
                other => {
                    return Err(GeomError::Domain(format!(
                        "{name} join factor must have diameter <= π, got {other:?}"
                    )))
                }
            }
        }
        Ok(SphericalJoinSpace {
            id: SpaceId::fresh(),
            left,
            right,
            spheres: None,
            tip: None,
            policy,
        })
    }

    /// Join of two unit spheres, which is isometric to the unit sphere of
    /// dimension `m + n + 1` via `ι(u, v, t) ↦ (sin t·u, cos t·v)`.
    pub fn of_spheres(left: Arc<SphereSpace>, right: Arc<SphereSpace>) -> Result<Self> {
        if left.radius() != 1.0 || right.radius() != 1.0 {
            return Err(GeomError::Domain("join factors must be unit spheres".into()));
        }
        let mut join = Self::new(left.clone(), right.clone())?;
        join.spheres = Some((left, right));
        Ok(join)
    }

    pub fn left(&self) -> &Arc<dyn Space> {
        &self.left
    }

    pub fn right(&self) -> &Arc<dyn Space> {
        &self.right
    }

    /// `ι(u, v, t)`.
    pub fn point(&self, u: Point, v: Point, t: f64) -> Result<Point> {
        let tol = self.policy.membership_tol;
        if !(t >= -tol && t <= FRAC_PI_2 + tol) {
            return Err(GeomError::Domain(format!("join parameter {t} outside [0, π/2]")));
        }
        self.left.validate(&u)?;
        self.right.validate(&v)?;
        Ok(self.raw(u, v, t.clamp(0.0, FRAC_PI_2)))
    }

    pub(crate) fn raw(&self, u: Point, v: Point, t: f64) -> Point {
        Point::new(
            self.id,
            Coords::Join {
                u: Box::new(u),
                v: Box::new(v),
                t,
            },
        )
    }

    pub fn parts<'p>(&self, p: &'p Point) -> Result<(&'p Point, &'p Point, f64)> {
        p.check_space(self.id)?;
        match p.coords() {
            Coords::Join { u, v, t } => Ok((u, v, *t)),
            _ => Err(GeomError::Domain("expected join coordinates".into())),
        }
    }

    /// Tip `s` of a spherical cone; any base point serves as `u`.
    pub fn tip(&self, any_base: Point) -> Result<Point> {
        let s = self.tip_space()?.point();
        self.point(any_base, s, 0.0)
    }

    /// Point at distance `t` from the tip above `u ∈ K`.
    pub fn cone_point(&self, u: Point, t: f64) -> Result<Point> {
        let s = self.tip_space()?.point();
        self.point(u, s, t)
    }

    fn tip_space(&self) -> Result<&Arc<OnePointSpace>> {
        self.tip
            .as_ref()
            .ok_or_else(|| GeomError::Domain("not a spherical cone".into()))
    }

    pub fn is_spherical_cone(&self) -> bool {
        self.tip.is_some()
    }

    /// Ambient coordinates `(sin t·u, cos t·v)` for joins of unit spheres.
    pub fn to_sphere_coords(&self, p: &Point) -> Result<Coord> {
        let (ls, rs) = self.sphere_factors()?;
        let (u, v, t) = self.parts(p)?;
        let (su, cu) = t.sin_cos();
        let mut out = vecmath::scale(su, ls.coords(u)?);
        out.extend(rs.coords(v)?.iter().map(|x| cu * x));
        Ok(out)
    }

    /// Inverse of [`to_sphere_coords`](Self::to_sphere_coords); a vanishing
    /// component gets the north pole of its factor.
    pub fn from_sphere_coords(&self, z: &[f64]) -> Result<Point> {
        let (ls, rs) = self.sphere_factors()?;
        let nl = ls.ambient_dim();
        if z.len() != nl + rs.ambient_dim() {
            return Err(GeomError::Domain("wrong ambient dimension for join".into()));
        }
        let (zu, zv) = z.split_at(nl);
        let (a, b) = (vecmath::norm(zu), vecmath::norm(zv));
        let u = if a > 0.0 { ls.point_normalized(zu)? } else { ls.pole() };
        let v = if b > 0.0 { rs.point_normalized(zv)? } else { rs.pole() };
        Ok(self.raw(u, v, a.atan2(b)))
    }

    fn sphere_factors(&self) -> Result<&(Arc<SphereSpace>, Arc<SphereSpace>)> {
        self.spheres
            .as_ref()
            .ok_or_else(|| GeomError::capability("sphere realisation", "non-spherical join"))
    }

    /// Join distance from factor distances, via the chord in the product of
    /// cones; equal to the arccos form but accurate for nearby points.
    pub fn join_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let (u1, v1, t1) = self.parts(x)?;
        let (u2, v2, t2) = self.parts(y)?;
        let (du, dv) = self.factor_angles(u1, v1, t1, u2, v2, t2)?;
        let (s1, c1) = t1.sin_cos();
        let (s2, c2) = t2.sin_cos();
        let chord_sq = cone_law_sq(s1, s2, du) + cone_law_sq(c1, c2, dv);
        let half = 0.5 * chord_sq.max(0.0).sqrt();
        if half > 1.0 + self.policy.arccos_slack {
            return Err(GeomError::Consistency(format!("join chord {half} exceeds 1")));
        }
        Ok(2.0 * half.min(1.0).asin())
    }

    fn factor_angles(
        &self,
        u1: &Point,
        v1: &Point,
        t1: f64,
        u2: &Point,
        v2: &Point,
        t2: f64,
    ) -> Result<(f64, f64)> {
        let tol = self.policy.abs_tol;
        // A factor with zero weight on either side does not enter the formula.
        let du = if t1 == 0.0 || t2 == 0.0 { 0.0 } else { self.left.distance(u1, u2)? };
        let dv = if t1 == FRAC_PI_2 || t2 == FRAC_PI_2 {
            0.0
        } else {
            self.right.distance(v1, v2)?
        };
        if du > PI + tol || dv > PI + tol {
            return Err(GeomError::Domain(format!(
                "join factor distance exceeds π ({du}, {dv})"
            )));
        }
        Ok((du.min(PI), dv.min(PI)))
    }
}

impl Space for SphericalJoinSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::SphericalJoin
    }

    fn curvature_bound(&self) -> f64 {
        1.0
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some(PI)
    }

    fn uniqueness_radius(&self) -> f64 {
        PI
    }

    fn capabilities(&self) -> Capabilities {
        let l = self.left.capabilities();
        let r = self.right.capabilities();
        Capabilities {
            has_exp_log: false,
            has_exact_geodesics: l.has_exact_geodesics && r.has_exact_geodesics,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let (u, v, t) = self.parts(p)?;
        if !(0.0..=FRAC_PI_2).contains(&t) {
            return Err(GeomError::Domain(format!("join parameter {t} outside [0, π/2]")));
        }
        self.left.validate(u)?;
        self.right.validate(v)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.join_distance(x, y)
    }

    /// Geodesics are unfolded into the unit 3-sphere of `ℝ² × ℝ²`, where the
    /// two planes carry the cone sectors over the factor geodesics `[u₁ u₂]`
    /// and `[v₁ v₂]`; the great-circle arc is pulled back factorwise. For a
    /// spherical cone over an arc this is the unfolding onto a sector of S².
    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (u1, v1, t1) = self.parts(x)?;
        let (u2, v2, t2) = self.parts(y)?;
        if s == 0.0 {
            return Ok(x.clone());
        }
        if s == 1.0 {
            return Ok(y.clone());
        }
        let (du, dv) = self.factor_angles(u1, v1, t1, u2, v2, t2)?;
        let (s1, c1) = t1.sin_cos();
        let (s2, c2) = t2.sin_cos();
        let p1 = [s1, 0.0, c1, 0.0];
        let p2 = [s2 * du.cos(), s2 * du.sin(), c2 * dv.cos(), c2 * dv.sin()];
        let theta = vecmath::angle(&p1, &p2);
        self.check_unique(theta)?;
        let q: Coord = if theta < 1e-12 {
            vecmath::axpby(1.0 - s, &p1, s, &p2)
        } else {
            let st = theta.sin();
            vecmath::axpby(((1.0 - s) * theta).sin() / st, &p1, (s * theta).sin() / st, &p2)
        };
        let ra = q[0].hypot(q[1]);
        let rb = q[2].hypot(q[3]);
        let t = ra.atan2(rb);
        let u = pull_back(&*self.left, u1, u2, du, q[1].atan2(q[0]))?;
        let v = pull_back(&*self.right, v1, v2, dv, q[3].atan2(q[2]))?;
        Ok(self.raw(u, v, t.clamp(0.0, FRAC_PI_2)))
    }
}

fn pull_back(space: &dyn Space, a: &Point, b: &Point, angle: f64, phi: f64) -> Result<Point> {
    if angle == 0.0 {
        return Ok(a.clone());
    }
    let frac = (phi / angle).clamp(0.0, 1.0);
    space.geodesic_point(a, b, frac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::IntervalSpace;
    use std::f64::consts::FRAC_PI_4;

    fn literal_formula(t1: f64, t2: f64, du: f64, dv: f64) -> f64 {
        (t1.sin() * t2.sin() * du.cos() + t1.cos() * t2.cos() * dv.cos())
            .clamp(-1.0, 1.0)
            .acos()
    }

    #[test]
    fn matches_arccos_form() {
        let arc = Arc::new(IntervalSpace::new(PI).unwrap());
        let j = SphericalJoinSpace::new(arc.clone(), arc.clone()).unwrap();
        for &(a1, b1, t1, a2, b2, t2) in &[
            (0.1, 0.2, 0.3, 1.0, 2.5, 1.2),
            (0.0, 0.0, FRAC_PI_2, 3.0, 3.1, 0.0),
            (1.0, 2.0, FRAC_PI_4, 2.0, 3.0, FRAC_PI_4),
        ] {
            let x = j.point(arc.point(a1).unwrap(), arc.point(b1).unwrap(), t1).unwrap();
            let y = j.point(arc.point(a2).unwrap(), arc.point(b2).unwrap(), t2).unwrap();
            let d = j.distance(&x, &y).unwrap();
            let expect = literal_formula(t1, t2, (a1 - a2).abs(), (b1 - b2).abs());
            assert!((d - expect).abs() < 1e-12, "{d} vs {expect}");
        }
    }

    #[test]
    fn equal_weights_preserve_common_distance() {
        let arc = Arc::new(IntervalSpace::new(PI).unwrap());
        let j = SphericalJoinSpace::new(arc.clone(), arc.clone()).unwrap();
        let d = 0.9;
        let x = j.point(arc.point(0.2).unwrap(), arc.point(1.0).unwrap(), FRAC_PI_4).unwrap();
        let y = j.point(arc.point(0.2 + d).unwrap(), arc.point(1.0 + d).unwrap(), FRAC_PI_4).unwrap();
        assert!((j.distance(&x, &y).unwrap() - d).abs() < 1e-14);
        assert_eq!(j.distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn pole_to_slice_is_right_angle() {
        let arc = Arc::new(IntervalSpace::new(1.0).unwrap());
        let j = SphericalJoinSpace::new(arc.clone(), arc.clone()).unwrap();
        let x = j.point(arc.point(0.3).unwrap(), arc.point(0.1).unwrap(), FRAC_PI_2).unwrap();
        let y = j.point(arc.point(0.9).unwrap(), arc.point(0.4).unwrap(), 0.0).unwrap();
        assert!((j.distance(&x, &y).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn spherical_cone_distances() {
        let arc = Arc::new(IntervalSpace::new(FRAC_PI_2).unwrap());
        let cone = spherical_cone(arc.clone()).unwrap();
        let tip = cone.tip(arc.point(0.0).unwrap()).unwrap();
        let a = cone.cone_point(arc.point(0.2).unwrap(), FRAC_PI_2).unwrap();
        let b = cone.cone_point(arc.point(1.3).unwrap(), FRAC_PI_2).unwrap();
        assert!((cone.distance(&tip, &a).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((cone.distance(&a, &b).unwrap() - 1.1).abs() < 1e-14);
        let t = 0.7;
        let c = cone.cone_point(arc.point(0.2).unwrap(), t).unwrap();
        let e = cone.cone_point(arc.point(1.3).unwrap(), t).unwrap();
        let expect = (t.sin().powi(2) * 1.1f64.cos() + t.cos().powi(2)).acos();
        assert!((cone.distance(&c, &e).unwrap() - expect).abs() < 1e-14);
        assert!((cone.distance(&tip, &c).unwrap() - t).abs() < 1e-15);
    }

    #[test]
    fn radial_geodesic_in_cone() {
        let arc = Arc::new(IntervalSpace::new(FRAC_PI_2).unwrap());
        let cone = spherical_cone(arc.clone()).unwrap();
        let x = cone.cone_point(arc.point(0.4).unwrap(), 0.2).unwrap();
        let y = cone.cone_point(arc.point(0.4).unwrap(), 1.4).unwrap();
        let m = cone.geodesic_point(&x, &y, 0.5).unwrap();
        let (u, _, t) = cone.parts(&m).unwrap();
        assert!((t - 0.8).abs() < 1e-14);
        assert!((arc.param(u).unwrap() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn base_diameter_is_enforced() {
        let big = Arc::new(IntervalSpace::new(4.0).unwrap());
        assert!(SphericalJoinSpace::new(big.clone(), big).is_err());
    }
}
