use super::{TimeDependentFamily, Trajectory};
use crate::error::Result;
use crate::metric::Point;

/// Outcome of checking the defining inequality along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EviReport {
    /// Smallest normalised slack `(rhs - d(p, α(t+ε)))/ε`.
    pub worst_slack: f64,
    pub worst_step: usize,
    pub worst_witness: usize,
    pub tolerance: f64,
    pub checked: usize,
    /// Pairs skipped because the witness coincided with the curve.
    pub skipped: usize,
    pub violations: usize,
}

impl EviReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks, for each step `t → t + ε` and witness `p` with `d = d(p, α(t))`,
///
/// `d(p, α(t+ε)) <= d - ε·[(f_t(p) - f_t(α(t)))/d - (λ/2)·d] + tol·ε`.
///
/// The bracket bounds the directional derivative of `f_t` at `α(t)` towards
/// `p` from below, by λ-concavity, so every gradient curve satisfies the
/// inequality up to `o(ε)`.
pub fn check_evi(
    traj: &Trajectory,
    family: &dyn TimeDependentFamily,
    witnesses: &[Point],
    tol: f64,
) -> Result<EviReport> {
    let space = family.space();
    let lambda = family.lambda();
    let resolution = space.policy().resolution.max(1e-12);
    let mut report = EviReport {
        worst_slack: f64::INFINITY,
        worst_step: 0,
        worst_witness: 0,
        tolerance: tol,
        checked: 0,
        skipped: 0,
        violations: 0,
    };
    for i in 0..traj.len().saturating_sub(1) {
        let (t, eps) = (traj.times[i], traj.times[i + 1] - traj.times[i]);
        if !(eps > 0.0) {
            continue;
        }
        let (a, b) = (&traj.points[i], &traj.points[i + 1]);
        let fa = family.value(t, a)?;
        for (w, p) in witnesses.iter().enumerate() {
            let d = space.distance(p, a)?;
            if d <= resolution || d >= space.uniqueness_radius() {
                report.skipped += 1;
                continue;
            }
            let fp = family.value(t, p)?;
            let rhs = d - eps * ((fp - fa) / d - 0.5 * lambda * d);
            let slack = (rhs - space.distance(p, b)?) / eps;
            report.checked += 1;
            if slack < -tol {
                report.violations += 1;
            }
            if slack < report.worst_slack {
                report.worst_slack = slack;
                report.worst_step = i;
                report.worst_witness = w;
            }
        }
    }
    Ok(report)
}
