//! Gradient curves of time-dependent semiconcave families.
//!
//! On each step `[t_i, t_{i+1})` the family is frozen at `t_i` and the point
//! moves by an explicit exponential-map step along the gradient. The
//! checkers test the defining distance inequality against witness points and
//! the distance estimate between two curves.
//!
//! Sign convention: a function is λ-concave when its second derivative along
//! unit-speed geodesics is at most λ, so `-|x|²/2` has `λ = -1`.

mod estimate;
mod evi;
mod families;
mod trajectory;

pub use estimate::{distance_estimate_bound, verify_distance_estimate, EstimateBound, EstimateReport};
pub use evi::{check_evi, EviReport};
pub use families::{QuadraticFamily, ShiftedFamily, TractrixFamily};
pub use trajectory::Trajectory;

use crate::error::{GeomError, Result};
use crate::metric::{Point, Space, TangentVector};
use crate::tractrix::Partition;

/// A family `f_t` of λ-concave functions with a joint Lipschitz constant.
pub trait TimeDependentFamily: Send + Sync {
    fn space(&self) -> &dyn Space;

    /// `f_t(x)`.
    fn value(&self, t: f64, x: &Point) -> Result<f64>;

    /// Concavity bound λ (signed).
    fn lambda(&self) -> f64;

    /// Lipschitz constant of `(x, t) ↦ f_t(x)`.
    fn lipschitz(&self) -> f64;

    /// Whether `(x, t)` lies in the domain Ω.
    fn contains(&self, _t: f64, _x: &Point) -> Result<bool> {
        Ok(true)
    }

    /// Gradient oracle.
    fn gradient(&self, _t: f64, _x: &Point) -> Result<TangentVector> {
        Err(GeomError::capability("gradient oracle", self.space().kind()))
    }
}

/// `∇_p f_t`, checking that `(p, t)` is in the domain.
pub fn gradient(family: &dyn TimeDependentFamily, t: f64, p: &Point) -> Result<TangentVector> {
    if !family.contains(t, p)? {
        return Err(GeomError::Domain(format!("point outside the domain at time {t}")));
    }
    family.gradient(t, p)
}

/// Frozen-time explicit scheme on `[a, b]` with step at most `delta`.
///
/// Stops at the first time the curve leaves the domain (recorded as the
/// escape time) or a gradient or exponential step fails (recorded as a
/// diagnostic); the trajectory up to that point is returned.
pub fn evolve(
    family: &dyn TimeDependentFamily,
    p0: &Point,
    a: f64,
    b: f64,
    delta: f64,
) -> Result<Trajectory> {
    let part = Partition::with_step(a, b, delta)?;
    evolve_on(family, p0, &part)
}

/// [`evolve`] on an explicit partition.
pub fn evolve_on(family: &dyn TimeDependentFamily, p0: &Point, part: &Partition) -> Result<Trajectory> {
    let space = family.space();
    if !space.capabilities().has_exp_log {
        return Err(GeomError::capability("gradient flow", space.kind()));
    }
    space.validate(p0)?;
    if !family.contains(part.start(), p0)? {
        return Err(GeomError::precondition(
            "initial point outside the domain",
            format!("{:?} at t = {}", p0.flat_coords(), part.start()),
        ));
    }
    let mut traj = Trajectory::new(space.id(), part.max_gap());
    traj.push(part.time(0), p0.clone());
    let mut p = p0.clone();
    for i in 0..part.steps() {
        let (t, t_next) = (part.time(i), part.time(i + 1));
        let step = gradient(family, t, &p).and_then(|g| space.exp_map(&p, &g.scale(t_next - t)));
        match step {
            Ok(q) => {
                if !family.contains(t_next, &q)? {
                    traj.escape = Some(t_next);
                    break;
                }
                traj.push(t_next, q.clone());
                p = q;
            }
            Err(e) => {
                traj.diagnostic = Some(format!("stopped at t = {t}: {e}"));
                break;
            }
        }
    }
    Ok(traj)
}
