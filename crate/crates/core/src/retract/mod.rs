//! Short retractions.
//!
//! * [`radial_retraction`] folds the annulus `π/2 < d(p, x) < π` back onto
//!   the ball `B̄(p, π/2)` and sends everything farther to `p`.
//! * [`PhiPipeline`] retracts `U` onto a weakly convex `K` by gluing the
//!   spherical cone over `K` to `U` and running the tractrix flow with
//!   `r = π/2` along the geodesic from `p` to the cone tip.
//! * [`PsiPipeline`] retracts `U × U` onto its diagonal by running the same
//!   construction inside the join `U ⋆ U`.
//! * [`ConeRetraction`] pushes the nearest point of the Euclidean cone over
//!   `K` out to the unit sphere along the direction `p`.

mod cone;
mod glued;
mod radial;

pub use cone::{ConeRetraction, ConeSet};
pub use glued::{PhiOutput, PhiPipeline, PsiPipeline};
pub use radial::{radial_retraction, RadialMap};

use crate::error::Result;
use crate::metric::Point;
use crate::tractrix::PointMap;

/// Pointwise comparison of two retractions with the same source and target.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// `d(f(x_i), g(x_i))` per probe; `None` where either map failed.
    pub differences: Vec<Option<f64>>,
    pub max_difference: f64,
    pub failures: usize,
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe,difference\n");
        for (i, d) in self.differences.iter().enumerate() {
            match d {
                Some(d) => out.push_str(&format!("{i},{d}\n")),
                None => out.push_str(&format!("{i},\n")),
            }
        }
        out
    }
}

pub fn compare_retractions(
    first: &dyn PointMap,
    second: &dyn PointMap,
    probes: &[Point],
) -> Result<ComparisonReport> {
    let a = first.apply_many(probes);
    let b = second.apply_many(probes);
    let mut report = ComparisonReport {
        differences: Vec::with_capacity(probes.len()),
        max_difference: 0.0,
        failures: 0,
    };
    for (x, y) in a.iter().zip(&b) {
        match (x, y) {
            (Ok(x), Ok(y)) => {
                let d = first.target().distance(x, y)?;
                report.max_difference = report.max_difference.max(d);
                report.differences.push(Some(d));
            }
            _ => {
                report.failures += 1;
                report.differences.push(None);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
