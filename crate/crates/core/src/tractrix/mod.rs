//! The r-tractrix flow.
//!
//! `φ_t` drags points behind a 1-Lipschitz driving curve `γ` on a thread of
//! length `r`. The reference scheme composes closest-point projections onto
//! the moving balls `B̄(γ(t_i), r)` over a uniform partition; on backends with
//! exp/log the same flow is also available as the gradient curve of
//! `f_t = -max{r, dist_{γ(t)}}`.

mod lipschitz;

pub use lipschitz::{
    estimate_lipschitz, FnMap, LipschitzOptions, LipschitzRecord, LipschitzReport, PointMap, RatioBin,
};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::flow::{evolve_on, TractrixFamily, Trajectory};
use crate::metric::{Point, Space};

/// Concavity bound of `-dist_w` on the collar `r <= dist_w <= r + collar` of a
/// space with curvature at most κ.
///
/// For κ > 0 the distance function is `√κ·tan(√κ·ρ - π/2)`-convex at radius ρ
/// beyond the hemisphere, so the bound is positive only once the collar
/// crosses `π/(2√κ)`; otherwise it is zero.
pub fn collar_lambda(kappa: f64, r: f64, collar: f64) -> f64 {
    if kappa <= 0.0 {
        return 0.0;
    }
    let s = kappa.sqrt();
    let arg = s * (r + collar) - PI / 2.0;
    if arg <= 0.0 {
        0.0
    } else {
        (s * arg.min(PI / 2.0 - 1e-12).tan()).max(0.0)
    }
}

type CurveFn = dyn Fn(f64) -> Result<Point> + Send + Sync;

/// A curve `γ: [a, b] → U` with a declared Lipschitz constant.
#[derive(Clone)]
pub struct DrivingCurve {
    a: f64,
    b: f64,
    lipschitz: f64,
    f: Arc<CurveFn>,
}

impl fmt::Debug for DrivingCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DrivingCurve")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl DrivingCurve {
    pub fn from_fn(
        a: f64,
        b: f64,
        lipschitz: f64,
        f: impl Fn(f64) -> Result<Point> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(GeomError::Configuration(format!("bad curve interval [{a}, {b}]")));
        }
        if !(lipschitz >= 0.0 && lipschitz <= 1.0 + 1e-12) {
            return Err(GeomError::Configuration(format!(
                "driving curve must be 1-Lipschitz, declared {lipschitz}"
            )));
        }
        Ok(DrivingCurve {
            a,
            b,
            lipschitz,
            f: Arc::new(f),
        })
    }

    /// Constant-speed geodesic from `from` (at `a`) to `to` (at `b`).
    pub fn geodesic(space: Arc<dyn Space>, from: Point, to: Point, a: f64, b: f64) -> Result<Self> {
        space.validate(&from)?;
        space.validate(&to)?;
        let d = space.distance(&from, &to)?;
        if b <= a || d == 0.0 {
            return Self::stationary(from, a, b);
        }
        space.check_unique(d)?;
        let speed = d / (b - a);
        Self::from_fn(a, b, speed, move |t| space.geodesic_point(&from, &to, (t - a) / (b - a)))
    }

    pub fn stationary(p: Point, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(a, b, 0.0, move |_| Ok(p.clone()))
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `γ(t)`; times within 1e-12 of the interval are clamped.
    pub fn at(&self, t: f64) -> Result<Point> {
        let tol = 1e-12 * (1.0 + self.a.abs().max(self.b.abs()));
        if !(t >= self.a - tol && t <= self.b + tol) {
            return Err(GeomError::Domain(format!(
                "time {t} outside the curve interval [{}, {}]",
                self.a, self.b
            )));
        }
        (self.f)(t.clamp(self.a, self.b))
    }

    /// The same curve on the subinterval `[a2, b2]`.
    pub fn restrict(&self, a2: f64, b2: f64) -> Result<Self> {
        if !(a2 >= self.a && b2 <= self.b && a2 <= b2) {
            return Err(GeomError::Domain(format!(
                "[{a2}, {b2}] is not inside [{}, {}]",
                self.a, self.b
            )));
        }
        Ok(DrivingCurve {
            a: a2,
            b: b2,
            ..self.clone()
        })
    }

    /// Largest `d(γ(t_i), γ(t_j)) - L·|t_i - t_j|` over `samples + 1` equally
    /// spaced times (all pairs).
    pub fn check_lipschitz(&self, space: &dyn Space, samples: usize) -> Result<f64> {
        let part = Partition::with_steps(self.a, self.b, samples.max(1))?;
        let pts = (0..=part.steps())
            .map(|i| self.at(part.time(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = space.distance(&pts[i], &pts[j])?;
                worst = worst.max(d - self.lipschitz * (part.time(j) - part.time(i)));
            }
        }
        Ok(worst)
    }
}

/// Uniform partition `a = t_0 < ... < t_n = b`.
///
/// `t_i = a + (b - a)·(i/n)`, so the times of a partition with `n` steps are
/// reproduced bit for bit by the even times of the one with `2n` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    a: f64,
    b: f64,
    n: usize,
}

impl Partition {
    /// Fewest uniform steps of length at most `delta`.
    pub fn with_step(a: f64, b: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(GeomError::Configuration(format!("step must be positive, got {delta}")));
        }
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(GeomError::Configuration(format!("bad interval [{a}, {b}]")));
        }
        let n = ((b - a) / delta * (1.0 - 1e-12)).ceil() as usize;
        Ok(Partition { a, b, n })
    }

    pub fn with_steps(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(GeomError::Configuration(format!("bad interval [{a}, {b}]")));
        }
        Ok(Partition { a, b, n })
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn time(&self, i: usize) -> f64 {
        if i >= self.n {
            return self.b;
        }
        self.a + (self.b - self.a) * (i as f64 / self.n as f64)
    }

    pub fn max_gap(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.b - self.a) / self.n as f64
        }
    }

    /// The partition with every step halved.
    pub fn refined(&self) -> Self {
        Partition {
            n: self.n * 2,
            ..*self
        }
    }
}

fn check_radius(space: &dyn Space, r: f64) -> Result<()> {
    let kappa = space.curvature_bound();
    let limit = if kappa > 0.0 { PI / kappa.sqrt() } else { f64::INFINITY };
    if !(r > 0.0 && r < limit) {
        return Err(GeomError::Configuration(format!(
            "thread length must lie in (0, {limit}), got {r}"
        )));
    }
    Ok(())
}

fn check_start(space: &dyn Space, gamma: &DrivingCurve, r: f64, p: &Point) -> Result<()> {
    space.validate(p)?;
    let m = space.measured_distance(p, &gamma.at(gamma.a)?)?;
    let tol = space.policy().abs_tol + m.error_bound;
    if m.value > r + tol {
        return Err(GeomError::precondition(
            "initial point outside the starting ball",
            format!("distance {} > r = {r}", m.value),
        ));
    }
    Ok(())
}

/// Counters from a run of the projection scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DriveStats {
    /// Projections evaluated.
    pub projections: usize,
    /// Projections skipped because the point was certainly inside the ball.
    pub skipped: usize,
    /// Projections that had to choose between distinct candidates.
    pub ambiguous: usize,
    pub max_ambiguity: f64,
}

/// Runs the projection scheme for many points at once, one partition step
/// at a time so that each ball projector is prepared once. `visit` sees the
/// step index and the current points after every step, starting with step 0
/// (the inputs). Points whose projection failed stay failed.
///
/// A point left in place with slack `s = r - d(x, γ(t_j))` stays inside
/// `B̄(γ(t), r)` while `L·(t - t_j) <= s`, so those projections are skipped.
pub fn drive(
    space: &dyn Space,
    gamma: &DrivingCurve,
    r: f64,
    part: &Partition,
    points: &[Point],
    mut visit: impl FnMut(usize, &[Result<Point>]),
) -> Result<(Vec<Result<Point>>, DriveStats)> {
    check_radius(space, r)?;
    if part.start() < gamma.a || part.end() > gamma.b {
        return Err(GeomError::Domain("partition outside the curve interval".into()));
    }
    let mut cur: Vec<Result<Point>> = points
        .iter()
        .map(|p| check_start(space, gamma, r, p).map(|_| p.clone()))
        .collect();
    let margin = space.policy().abs_tol;
    let speed = gamma.lipschitz;
    let mut safe_until = vec![f64::NEG_INFINITY; points.len()];
    let mut stats = DriveStats::default();
    visit(0, &cur);
    for i in 1..=part.steps() {
        let t = part.time(i);
        let proj = gamma.at(t).and_then(|c| space.ball_projector(&c, r));
        match proj {
            Ok(proj) => {
                for (slot, safe) in cur.iter_mut().zip(safe_until.iter_mut()) {
                    let Ok(p) = slot else { continue };
                    if t <= *safe {
                        stats.skipped += 1;
                        continue;
                    }
                    stats.projections += 1;
                    match proj.project(p) {
                        Ok(pr) => {
                            if let Some(a) = pr.ambiguity {
                                stats.ambiguous += 1;
                                stats.max_ambiguity = stats.max_ambiguity.max(a);
                            }
                            if pr.moved {
                                *slot = Ok(pr.point);
                            } else if pr.slack > margin {
                                *safe = if speed > 0.0 {
                                    t + (pr.slack - margin) / speed
                                } else {
                                    f64::INFINITY
                                };
                            }
                        }
                        Err(e) => {
                            *slot = Err(GeomError::Consistency(format!("projection at t = {t}: {e}")))
                        }
                    }
                }
            }
            Err(e) => {
                for slot in cur.iter_mut() {
                    if slot.is_ok() {
                        *slot = Err(e.clone());
                    }
                }
            }
        }
        visit(i, &cur);
    }
    Ok((cur, stats))
}

/// Trajectory `p_i = θ_{t_i}(p_{i-1})` of the projection scheme with step at
/// most `delta`.
pub fn tractrix_flow(
    space: &dyn Space,
    gamma: &DrivingCurve,
    r: f64,
    delta: f64,
    p: &Point,
) -> Result<Trajectory> {
    let (a, b) = gamma.interval();
    tractrix_flow_on(space, gamma, r, &Partition::with_step(a, b, delta)?, p)
}

pub fn tractrix_flow_on(
    space: &dyn Space,
    gamma: &DrivingCurve,
    r: f64,
    part: &Partition,
    p: &Point,
) -> Result<Trajectory> {
    check_radius(space, r)?;
    check_start(space, gamma, r, p)?;
    let mut traj = Trajectory::new(space.id(), part.max_gap());
    let mut failed = None;
    drive(space, gamma, r, part, std::slice::from_ref(p), |i, cur| {
        if failed.is_some() {
            return;
        }
        match &cur[0] {
            Ok(q) => traj.push(part.time(i), q.clone()),
            Err(e) => failed = Some(e.to_string()),
        }
    })?;
    traj.diagnostic = failed;
    Ok(traj)
}

/// The flow as the gradient curve of `f_t = -max{r, dist_{γ(t)}}` on the
/// collar of width `collar`, by the frozen-time exp scheme.
pub fn tractrix_flow_gradient(
    space: Arc<dyn Space>,
    gamma: &DrivingCurve,
    r: f64,
    delta: f64,
    collar: f64,
    p: &Point,
) -> Result<Trajectory> {
    check_radius(&*space, r)?;
    if !space.capabilities().has_exp_log {
        return Err(GeomError::capability("gradient tractrix flow", space.kind()));
    }
    check_start(&*space, gamma, r, p)?;
    let (a, b) = gamma.interval();
    let family = TractrixFamily::new(space, gamma.clone(), r, collar)?;
    evolve_on(&family, p, &Partition::with_step(a, b, delta)?)
}

/// `φ_t` for a fixed `t`, evaluated by the projection scheme.
#[derive(Clone, Debug)]
pub struct FlowMap {
    space: Arc<dyn Space>,
    gamma: DrivingCurve,
    r: f64,
    part: Partition,
}

impl FlowMap {
    pub fn new(space: Arc<dyn Space>, gamma: DrivingCurve, r: f64, delta: f64, t: f64) -> Result<Self> {
        check_radius(&*space, r)?;
        let (a, b) = gamma.interval();
        if !(t >= a && t <= b) {
            return Err(GeomError::Domain(format!("flow time {t} outside [{a}, {b}]")));
        }
        let part = Partition::with_step(a, t, delta)?;
        Ok(FlowMap {
            space,
            gamma,
            r,
            part,
        })
    }

    pub fn space(&self) -> &Arc<dyn Space> {
        &self.space
    }

    pub fn gamma(&self) -> &DrivingCurve {
        &self.gamma
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn partition(&self) -> &Partition {
        &self.part
    }

    pub fn trajectory(&self, p: &Point) -> Result<Trajectory> {
        tractrix_flow_on(&*self.space, &self.gamma, self.r, &self.part, p)
    }
}

impl PointMap for FlowMap {
    fn source(&self) -> &dyn Space {
        &*self.space
    }

    fn target(&self) -> &dyn Space {
        &*self.space
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        self.apply_many(std::slice::from_ref(x)).remove(0)
    }

    fn apply_many(&self, xs: &[Point]) -> Vec<Result<Point>> {
        match drive(&*self.space, &self.gamma, self.r, &self.part, xs, |_, _| {}) {
            Ok((v, _)) => v,
            Err(e) => xs.iter().map(|_| Err(e.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub delta: f64,
    /// `sup_i sup_t d(flow_δ(p_i)(t), flow_{δ/2}(p_i)(t))` over the probes.
    pub sup_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log deviation` against `log δ`; `None` when
    /// fewer than two rows have a positive deviation.
    pub order: Option<f64>,
    pub constant: Option<f64>,
}

/// Partition-refinement study: compares the scheme at each `δ` with the
/// scheme at `δ/2` on the common times.
pub fn convergence_study(
    space: &dyn Space,
    gamma: &DrivingCurve,
    r: f64,
    probes: &[Point],
    deltas: &[f64],
) -> Result<ConvergenceReport> {
    let (a, b) = gamma.interval();
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let coarse = Partition::with_step(a, b, delta)?;
        let fine = coarse.refined();
        let mut coarse_pts: Vec<Vec<Point>> = vec![Vec::new(); coarse.steps() + 1];
        drive(space, gamma, r, &coarse, probes, |i, cur| {
            coarse_pts[i] = cur.iter().filter_map(|p| p.as_ref().ok().cloned()).collect();
        })?;
        let mut sup: f64 = 0.0;
        let mut err = None;
        drive(space, gamma, r, &fine, probes, |i, cur| {
            if i % 2 != 0 || err.is_some() {
                return;
            }
            let reference = &coarse_pts[i / 2];
            for (j, p) in cur.iter().enumerate() {
                let res = match (p, reference.get(j)) {
                    (Ok(p), Some(q)) => space.distance(p, q),
                    _ => Err(GeomError::Consistency(format!("probe {j} failed at step {i}"))),
                };
                match res {
                    Ok(d) => sup = sup.max(d),
                    Err(e) => err = Some(e),
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        rows.push(ConvergenceRow {
            delta: coarse.max_gap(),
            sup_deviation: sup,
        });
    }
    let (order, constant) = fit_power_law(&rows);
    Ok(ConvergenceReport {
        rows,
        order,
        constant,
    })
}

fn fit_power_law(rows: &[ConvergenceRow]) -> (Option<f64>, Option<f64>) {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sup_deviation > 0.0 && r.delta > 0.0)
        .map(|r| (r.delta.ln(), r.sup_deviation.ln()))
        .collect();
    if pts.len() < 2 {
        return (None, None);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (None, None);
    }
    let slope = sxy / sxx;
    (Some(slope), Some((my - slope * mx).exp()))
}

/// Largest `d(p_i, γ(t_i)) - r` along a trajectory.
pub fn ball_containment_excess(
    space: &dyn Space,
    gamma: &DrivingCurve,
    r: f64,
    traj: &Trajectory,
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for (t, p) in traj.times.iter().zip(&traj.points) {
        worst = worst.max(space.distance(p, &gamma.at(*t)?)? - r);
    }
    Ok(worst)
}

/// Largest increase of the thread length `d(p_i, γ(t_i))` over steps that
/// start with the thread taut (length at least `r - tol`).
pub fn thread_increase(
    space: &dyn Space,
    gamma: &DrivingCurve,
    r: f64,
    traj: &Trajectory,
    tol: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut prev: Option<f64> = None;
    for (t, p) in traj.times.iter().zip(&traj.points) {
        let d = space.distance(p, &gamma.at(*t)?)?;
        if let Some(dp) = prev {
            if dp >= r - tol {
                worst = worst.max(d - dp);
            }
        }
        prev = Some(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
