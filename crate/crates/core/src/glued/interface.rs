use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::metric::{Capabilities, Point, Space, SpaceId, SpaceKind, TangentVector};
use crate::policy::NumericPolicy;
use crate::spaces::{IntervalSpace, SphereSpace};
use crate::vecmath::{self, Coord};

/// The subset `K` along which two pieces are glued.
///
/// `K` carries its own intrinsic metric space (used to build the spherical
/// cone) and an isometric embedding into the first piece.
pub trait Interface: Send + Sync + fmt::Debug {
    /// Intrinsic model of `K`.
    fn k_space(&self) -> Arc<dyn Space>;

    /// Image of a `K` point in the first piece.
    fn embed(&self, k: &Point) -> Result<Point>;

    /// Deterministic sampling of `K` whose gaps do not exceed `mesh`.
    fn samples(&self, mesh: f64) -> Result<Vec<Point>>;

    /// Every point of `K` lies within this distance of `samples(mesh)`.
    fn covering_radius(&self, mesh: f64) -> f64;

    /// Point of `K` nearest to a point of the first piece.
    fn nearest(&self, x: &Point) -> Result<Point>;

    /// Local minimisation of `objective` over `K` within `radius` of `seed`.
    /// Interfaces without a continuous model return `None`.
    fn refine(
        &self,
        _seed: &Point,
        _radius: f64,
        _tol: f64,
        _objective: &mut dyn FnMut(&Point) -> Result<f64>,
    ) -> Result<Option<(Point, f64)>> {
        Ok(None)
    }

    /// Minimises `objective` along the `K` geodesic from the point nearest
    /// `x` to `foot`. Exact when the objective increases along `K` away from
    /// both ends; `None` when the interface has no such model.
    fn segment_search(
        &self,
        _x: &Point,
        _foot: &Point,
        _tol: f64,
        _objective: &mut dyn FnMut(&Point) -> Result<f64>,
    ) -> Result<Option<(Point, f64)>> {
        Ok(None)
    }

    fn describe(&self) -> String;
}

/// Brent's parabolic/golden search for a minimum on `[lo, hi]`, to absolute
/// tolerance `tol`. The endpoints are compared at the end so boundary minima
/// of monotone objectives are returned exactly.
pub(crate) fn line_min(
    lo: f64,
    hi: f64,
    tol: f64,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const C: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let mut x = a + C * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let m = 0.5 * (a + b);
        let tol1 = 1e-10 * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let prev = e;
            e = d;
            if p.abs() < (0.5 * q * prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = C * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    for end in [lo, hi] {
        let val = f(end)?;
        if val < fx {
            x = end;
            fx = val;
        }
    }
    Ok((x, fx))
}

/// Geodesic arc `[start end]` of the first piece, modelled by an interval.
#[derive(Debug)]
pub struct ArcInterface {
    u: Arc<dyn Space>,
    start: Point,
    end: Point,
    k: Arc<IntervalSpace>,
}

impl ArcInterface {
    pub fn new(u: Arc<dyn Space>, start: Point, end: Point) -> Result<Self> {
        u.validate(&start)?;
        u.validate(&end)?;
        let length = u.distance(&start, &end)?;
        if length > 0.0 {
            u.check_unique(length)?;
        }
        if length > PI {
            return Err(GeomError::Domain(format!("interface arc of length {length} exceeds π")));
        }
        let k = Arc::new(IntervalSpace::new(length)?.with_policy(*u.policy()));
        Ok(ArcInterface { u, start, end, k })
    }

    /// Degenerate interface `K = {p}`.
    pub fn singleton(u: Arc<dyn Space>, p: Point) -> Result<Self> {
        Self::new(u, p.clone(), p)
    }

    pub fn length(&self) -> f64 {
        self.k.length()
    }

    pub fn interval(&self) -> &Arc<IntervalSpace> {
        &self.k
    }

    /// `K` point at arc parameter `a` (clamped).
    pub fn at(&self, a: f64) -> Point {
        self.k.clamped(a)
    }

    fn embed_param(&self, a: f64) -> Result<Point> {
        let len = self.length();
        if len == 0.0 {
            return Ok(self.start.clone());
        }
        self.u.geodesic_point(&self.start, &self.end, (a / len).clamp(0.0, 1.0))
    }
}

impl Interface for ArcInterface {
    fn k_space(&self) -> Arc<dyn Space> {
        self.k.clone()
    }

    fn embed(&self, k: &Point) -> Result<Point> {
        self.embed_param(self.k.param(k)?)
    }

    fn samples(&self, mesh: f64) -> Result<Vec<Point>> {
        check_mesh(mesh)?;
        let len = self.length();
        if len == 0.0 {
            return Ok(vec![self.at(0.0)]);
        }
        let n = (len / mesh).ceil().max(1.0) as usize;
        Ok((0..=n).map(|i| self.at(len * i as f64 / n as f64)).collect())
    }

    fn covering_radius(&self, mesh: f64) -> f64 {
        let len = self.length();
        if len == 0.0 {
            return 0.0;
        }
        0.5 * len / (len / mesh).ceil().max(1.0)
    }

    fn nearest(&self, x: &Point) -> Result<Point> {
        let len = self.length();
        if len == 0.0 {
            return Ok(self.at(0.0));
        }
        const SCAN: usize = 64;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=SCAN {
            let a = len * i as f64 / SCAN as f64;
            let d = self.u.distance(x, &self.embed_param(a)?)?;
            if d < best.1 {
                best = (a, d);
            }
        }
        let h = len / SCAN as f64;
        let tol = self.u.policy().refine_tol;
        let (a, _) = line_min((best.0 - h).max(0.0), (best.0 + h).min(len), tol, &mut |a| {
            self.u.distance(x, &self.embed_param(a)?)
        })?;
        Ok(self.at(a))
    }

    fn refine(
        &self,
        seed: &Point,
        radius: f64,
        tol: f64,
        objective: &mut dyn FnMut(&Point) -> Result<f64>,
    ) -> Result<Option<(Point, f64)>> {
        let len = self.length();
        if len == 0.0 {
            let k = self.at(0.0);
            let v = objective(&k)?;
            return Ok(Some((k, v)));
        }
        let a0 = self.k.param(seed)?;
        let (a, v) = line_min((a0 - radius).max(0.0), (a0 + radius).min(len), tol, &mut |a| {
            objective(&self.at(a))
        })?;
        Ok(Some((self.at(a), v)))
    }

    fn describe(&self) -> String {
        format!("arc of length {}", self.length())
    }
}

/// Closed cap `B̄(center, radius)` of a unit sphere `S^m`, embedded in
/// `S^{2m+1} ⊂ ℝ^{m+1} × ℝ^{m+1}` as the diagonal `u ↦ (u, u)/√2`.
///
/// This is the image of the diagonal of `U × U` under `ι(·, ·, π/4)` when the
/// join of two unit spheres is realised as `S^{2m+1}`.
#[derive(Debug)]
pub struct DiagonalInterface {
    base: Arc<SphereSpace>,
    target: Arc<SphereSpace>,
    center: Point,
    cap_radius: f64,
}

impl DiagonalInterface {
    pub fn new(base: Arc<SphereSpace>, center: Point, cap_radius: f64) -> Result<Self> {
        if base.radius() != 1.0 {
            return Err(GeomError::Domain("diagonal interface needs a unit sphere".into()));
        }
        base.validate(&center)?;
        if !(cap_radius > 0.0 && cap_radius <= PI / 2.0 + base.policy().abs_tol) {
            return Err(GeomError::Domain(format!("cap radius {cap_radius} outside (0, π/2]")));
        }
        let target = Arc::new(SphereSpace::unit(2 * base.dim() + 1).with_policy(*base.policy()));
        Ok(DiagonalInterface {
            base,
            target,
            center,
            cap_radius,
        })
    }

    pub fn base(&self) -> &Arc<SphereSpace> {
        &self.base
    }

    /// The sphere `S^{2m+1}` containing the embedded diagonal.
    pub fn target(&self) -> &Arc<SphereSpace> {
        &self.target
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn cap_radius(&self) -> f64 {
        self.cap_radius
    }

    /// Moves `u` along the meridian through `center` into the cap.
    fn clamp_into_cap(&self, u: &[f64]) -> Result<Point> {
        let c = self.base.coords(&self.center)?;
        let ang = vecmath::angle(u, c);
        if ang <= self.cap_radius {
            return self.base.point_normalized(u);
        }
        let along = vecmath::dot(u, c);
        let w = vecmath::axpby(1.0, u, -along, c);
        let nw = vecmath::norm(&w);
        if nw == 0.0 {
            return Err(GeomError::Domain("antipode of the cap centre has no nearest point".into()));
        }
        let (s, co) = self.cap_radius.sin_cos();
        self.base.point_normalized(&vecmath::axpby(co, c, s / nw, &w))
    }

    /// Frame `(center, e_1, ..., e_m)` at the cap centre.
    fn frame(&self) -> Result<(Coord, Vec<Coord>)> {
        let c: Coord = self.base.coords(&self.center)?.iter().copied().collect();
        let basis = vecmath::complement_basis(&c);
        Ok((c, basis))
    }
}

impl Interface for DiagonalInterface {
    fn k_space(&self) -> Arc<dyn Space> {
        self.base.clone()
    }

    fn embed(&self, k: &Point) -> Result<Point> {
        let u = self.base.coords(k)?;
        let mut z: Coord = u.iter().map(|x| x * FRAC_1_SQRT_2).collect();
        z.extend(u.iter().map(|x| x * FRAC_1_SQRT_2));
        Ok(self.target.raw(z))
    }

    /// Rings of constant distance from the centre (2-spheres; a circle cap is
    /// an arc and uses two directions).
    fn samples(&self, mesh: f64) -> Result<Vec<Point>> {
        check_mesh(mesh)?;
        let (c, basis) = self.frame()?;
        let rings = (self.cap_radius / mesh).ceil().max(1.0) as usize;
        let h = self.cap_radius / rings as f64;
        let mut out = vec![self.center.clone()];
        for j in 1..=rings {
            let theta = h * j as f64;
            let (st, ct) = theta.sin_cos();
            let dirs: Vec<Coord> = match basis.len() {
                1 => vec![basis[0].clone(), vecmath::scale(-1.0, &basis[0])],
                2 => {
                    let n = ((2.0 * PI * st) / mesh).ceil().max(3.0) as usize;
                    let offset = if j % 2 == 0 { 0.0 } else { 0.5 };
                    (0..n)
                        .map(|i| {
                            let phi = 2.0 * PI * (i as f64 + offset) / n as f64;
                            vecmath::axpby(phi.cos(), &basis[0], phi.sin(), &basis[1])
                        })
                        .collect()
                }
                _ => {
                    return Err(GeomError::capability(
                        "cap sampling above dimension 2",
                        SpaceKind::Sphere,
                    ))
                }
            };
            for d in dirs {
                out.push(self.base.point_normalized(&vecmath::axpby(ct, &c, st, &d))?);
            }
        }
        Ok(out)
    }

    fn covering_radius(&self, mesh: f64) -> f64 {
        mesh
    }

    fn nearest(&self, x: &Point) -> Result<Point> {
        let z = self.target.coords(x)?;
        let m = self.base.ambient_dim();
        let w: Coord = (0..m).map(|i| (z[i] + z[m + i]) * FRAC_1_SQRT_2).collect();
        if vecmath::norm(&w) == 0.0 {
            return Ok(self.center.clone());
        }
        self.clamp_into_cap(&w)
    }

    /// Compass search along a tangent frame, clamped into the cap.
    fn refine(
        &self,
        seed: &Point,
        radius: f64,
        tol: f64,
        objective: &mut dyn FnMut(&Point) -> Result<f64>,
    ) -> Result<Option<(Point, f64)>> {
        let mut cur = seed.clone();
        let mut fcur = objective(&cur)?;
        let mut h = radius.max(tol);
        let mut iters = 0;
        while h > tol && iters < 2000 {
            iters += 1;
            let basis = self.base.tangent_basis(&cur)?;
            let mut best: Option<(Point, f64)> = None;
            for e in &basis {
                for sign in [1.0, -1.0] {
                    let v = TangentVector {
                        base: cur.clone(),
                        direction: e.direction.iter().map(|x| sign * x).collect(),
                        magnitude: h,
                    };
                    let moved = self.base.exp_map(&cur, &v)?;
                    let cand = self.clamp_into_cap(self.base.coords(&moved)?)?;
                    let f = objective(&cand)?;
                    if f < best.as_ref().map_or(fcur, |b| b.1) {
                        best = Some((cand, f));
                    }
                }
            }
            match best {
                Some((p, f)) => {
                    cur = p;
                    fcur = f;
                }
                None => h *= 0.5,
            }
        }
        Ok(Some((cur, fcur)))
    }

    /// The cap is convex, so the arc between two of its points stays inside.
    fn segment_search(
        &self,
        x: &Point,
        foot: &Point,
        tol: f64,
        objective: &mut dyn FnMut(&Point) -> Result<f64>,
    ) -> Result<Option<(Point, f64)>> {
        let a = self.nearest(x)?;
        let len = self.base.distance(&a, foot)?;
        if len <= tol {
            let v = objective(&a)?;
            return Ok(Some((a, v)));
        }
        if len >= PI - self.base.policy().uniqueness_margin {
            return Ok(None);
        }
        let (s, v) = line_min(0.0, 1.0, tol / len, &mut |s| {
            objective(&self.base.geodesic_point(&a, foot, s)?)
        })?;
        Ok(Some((self.base.geodesic_point(&a, foot, s)?, v)))
    }

    fn describe(&self) -> String {
        format!("diagonal cap of radius {}", self.cap_radius)
    }
}

/// Restriction of a space to a finite subset: same points and metric, with
/// the diameter bound of the subset.
#[derive(Debug)]
pub struct SubsetSpace {
    inner: Arc<dyn Space>,
    diameter: f64,
}

impl Space for SubsetSpace {
    fn id(&self) -> SpaceId {
        self.inner.id()
    }
    fn kind(&self) -> SpaceKind {
        self.inner.kind()
    }
    fn curvature_bound(&self) -> f64 {
        self.inner.curvature_bound()
    }
    fn diameter_bound(&self) -> Option<f64> {
        Some(self.diameter)
    }
    fn uniqueness_radius(&self) -> f64 {
        self.inner.uniqueness_radius()
    }
    fn capabilities(&self) -> Capabilities {
        self.inner.capabilities()
    }
    fn policy(&self) -> &NumericPolicy {
        self.inner.policy()
    }
    fn validate(&self, p: &Point) -> Result<()> {
        self.inner.validate(p)
    }
    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.inner.distance(x, y)
    }
    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        self.inner.geodesic_point(x, y, s)
    }
}

/// Interface given only by a finite list of points of the first piece, e.g.
/// read from a gate file. No continuous refinement is possible; the declared
/// mesh is trusted as the covering radius.
#[derive(Debug)]
pub struct SampledInterface {
    points: Vec<Point>,
    k: Arc<SubsetSpace>,
    mesh: f64,
}

impl SampledInterface {
    pub fn new(u: Arc<dyn Space>, points: Vec<Point>, mesh: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(GeomError::Configuration("sampled interface has no points".into()));
        }
        check_mesh(mesh)?;
        let mut diameter: f64 = 0.0;
        for (i, a) in points.iter().enumerate() {
            u.validate(a)?;
            for b in &points[i + 1..] {
                diameter = diameter.max(u.distance(a, b)?);
            }
        }
        if diameter > PI {
            return Err(GeomError::Domain(format!("sampled interface has diameter {diameter} > π")));
        }
        let k = Arc::new(SubsetSpace { inner: u, diameter });
        Ok(SampledInterface { points, k, mesh })
    }

    /// Parses rows of comma-separated coordinates (blank lines and lines
    /// starting with `#` are skipped; a non-numeric first row is a header).
    pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if rows.is_empty() && lineno == 0 => continue,
                Err(e) => {
                    return Err(GeomError::Configuration(format!(
                        "gate row {}: {e}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(rows)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

impl Interface for SampledInterface {
    fn k_space(&self) -> Arc<dyn Space> {
        self.k.clone()
    }

    fn embed(&self, k: &Point) -> Result<Point> {
        Ok(k.clone())
    }

    fn samples(&self, _mesh: f64) -> Result<Vec<Point>> {
        Ok(self.points.clone())
    }

    fn covering_radius(&self, _mesh: f64) -> f64 {
        self.mesh
    }

    fn nearest(&self, x: &Point) -> Result<Point> {
        let mut best = (0, f64::INFINITY);
        for (i, k) in self.points.iter().enumerate() {
            let d = self.k.distance(x, k)?;
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok(self.points[best.0].clone())
    }

    fn describe(&self) -> String {
        format!("{} sampled points", self.points.len())
    }
}

fn check_mesh(mesh: f64) -> Result<()> {
    if !(mesh > 0.0) || !mesh.is_finite() {
        return Err(GeomError::Configuration(format!("gate mesh {mesh} must be > 0")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn line_search_finds_parabola_minimum() {
        let (x, fx) = line_min(-1.0, 3.0, 1e-10, &mut |x| Ok((x - 0.3) * (x - 0.3))).unwrap();
        assert!((x - 0.3).abs() < 1e-8 && fx < 1e-15);
        let (x, _) = line_min(0.0, 1.0, 1e-10, &mut |x| Ok(x)).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn arc_gate_count_and_embedding() {
        let s = Arc::new(SphereSpace::unit(2));
        let p = s.pole();
        let e = s.point(&[1.0, 0.0, 0.0]).unwrap();
        let arc = ArcInterface::new(s.clone(), p.clone(), e.clone()).unwrap();
        let mesh = PI / 200.0;
        let gates = arc.samples(mesh).unwrap();
        assert_eq!(gates.len(), (FRAC_PI_2 / mesh).ceil() as usize + 1);
        let last = arc.embed(gates.last().unwrap()).unwrap();
        assert!(s.distance(&last, &e).unwrap() < 1e-14);
        let x = s.from_angles(0.4, 1.0).unwrap();
        let k = arc.nearest(&x).unwrap();
        let d = s.distance(&x, &arc.embed(&k).unwrap()).unwrap();
        for g in &gates {
            assert!(d <= s.distance(&x, &arc.embed(g).unwrap()).unwrap() + 1e-12);
        }
    }

    #[test]
    fn diagonal_nearest_is_normalised_average() {
        let s2 = Arc::new(SphereSpace::unit(2));
        let iface = DiagonalInterface::new(s2.clone(), s2.pole(), FRAC_PI_2).unwrap();
        let u = s2.from_angles(0.7, 0.2).unwrap();
        let z = iface.embed(&u).unwrap();
        let back = iface.nearest(&z).unwrap();
        assert!(s2.distance(&back, &u).unwrap() < 1e-14);
        let v = s2.from_angles(0.3, 2.0).unwrap();
        let d = iface.target().distance(&z, &iface.embed(&v).unwrap()).unwrap();
        assert!((d - s2.distance(&u, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cap_samples_cover_cap() {
        let s2 = Arc::new(SphereSpace::unit(2));
        let iface = DiagonalInterface::new(s2.clone(), s2.pole(), FRAC_PI_2).unwrap();
        let mesh = PI / 20.0;
        let samples = iface.samples(mesh).unwrap();
        for i in 0..50 {
            let q = s2.from_angles(FRAC_PI_2 * (i as f64 / 49.0), 0.37 * i as f64).unwrap();
            let near = samples
                .iter()
                .map(|k| s2.distance(&q, k).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(near <= iface.covering_radius(mesh));
        }
    }

    #[test]
    fn gate_rows_parse_with_header() {
        let rows = SampledInterface::parse_rows("x0,x1,x2\n0,0,1\n\n# c\n1, 0, 0\n").unwrap();
        assert_eq!(rows, vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]);
        assert!(SampledInterface::parse_rows("0,0,1\nfoo,1,2\n").is_err());
    }
}
