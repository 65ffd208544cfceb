use super::Trajectory;
use crate::error::{GeomError, Result};
use crate::metric::Space;

/// Value of the distance-estimate bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateBound {
    pub value: f64,
    /// Set when `λ = 0` and `s > 0`, where the bound is the integrated form
    /// `√(ℓ(a)² + 4·s·dt)` of `ℓ' <= 2s/ℓ`.
    pub extension: bool,
}

/// Upper bound for `ℓ(a + dt)` given `ℓ(a)`, for gradient curves of two
/// λ-concave families differing by at most `s`:
///
/// * `s = 0`: `ℓ(a)·e^{λ·dt}`;
/// * `s > 0`, `λ ≠ 0`: `√max(0, (ℓ(a)² + 2s/λ)·e^{2λ·dt} - 2s/λ)`;
/// * `s > 0`, `λ = 0`: `√(ℓ(a)² + 4·s·dt)`.
pub fn distance_estimate_bound(lambda: f64, s: f64, ell_a: f64, dt: f64) -> Result<EstimateBound> {
    if !(s >= 0.0) || !(ell_a >= 0.0) || !(dt >= 0.0) {
        return Err(GeomError::Domain(format!(
            "estimate needs s, ℓ(a), dt >= 0, got {s}, {ell_a}, {dt}"
        )));
    }
    if s == 0.0 {
        return Ok(EstimateBound {
            value: ell_a * (lambda * dt).exp(),
            extension: false,
        });
    }
    if lambda == 0.0 {
        return Ok(EstimateBound {
            value: (ell_a * ell_a + 4.0 * s * dt).sqrt(),
            extension: true,
        });
    }
    let k = 2.0 * s / lambda;
    let sq = (ell_a * ell_a + k) * (2.0 * lambda * dt).exp() - k;
    Ok(EstimateBound {
        value: sq.max(0.0).sqrt(),
        extension: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// Largest `ℓ(t_i) - bound(t_i)`.
    pub worst_excess: f64,
    pub worst_time: f64,
    /// Allowed excess `C·δ`.
    pub allowed: f64,
    pub samples: usize,
    pub extension: bool,
}

impl EstimateReport {
    pub fn passed(&self) -> bool {
        self.worst_excess <= self.allowed
    }
}

/// Compares `ℓ(t) = d(α(t), β(t))` with the bound on the common sample
/// times, allowing an excess of `c_delta·δ` for the discretisation.
pub fn verify_distance_estimate(
    space: &dyn Space,
    a: &Trajectory,
    b: &Trajectory,
    lambda: f64,
    s: f64,
    c_delta: f64,
) -> Result<EstimateReport> {
    if a.is_empty() || b.is_empty() {
        return Err(GeomError::Configuration("empty trajectory".into()));
    }
    let t0 = a.times[0];
    let b0 = b
        .at_time(t0)
        .ok_or_else(|| GeomError::Configuration("trajectories start at different times".into()))?;
    let ell_a = space.distance(&a.points[0], b0)?;
    let step = a.step.max(b.step);
    let mut report = EstimateReport {
        worst_excess: f64::NEG_INFINITY,
        worst_time: t0,
        allowed: c_delta * step,
        samples: 0,
        extension: false,
    };
    for (t, p) in a.times.iter().zip(&a.points) {
        let Some(q) = b.at_time(*t) else { continue };
        let ell = space.distance(p, q)?;
        let bound = distance_estimate_bound(lambda, s, ell_a, t - t0)?;
        report.extension |= bound.extension;
        report.samples += 1;
        if ell - bound.value > report.worst_excess {
            report.worst_excess = ell - bound.value;
            report.worst_time = *t;
        }
    }
    Ok(report)
}
