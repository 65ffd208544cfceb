//! Builders and report writers shared by the commands and the suite.

use std::sync::Arc;

use serde_json::json;
use tractrix_core::flow::Trajectory;
use tractrix_core::metric::Point;
use tractrix_core::sampling::PairMode;
use tractrix_core::spaces::SphereSpace;
use tractrix_core::tractrix::{DrivingCurve, LipschitzOptions, LipschitzReport};

use crate::config::{usage, Config, UsageError};
use crate::manifest::Check;
use crate::svg::{self, Series};

/// Unit-speed meridian from the north pole towards `+x`, of length `len`.
pub(crate) fn meridian(s: &Arc<SphereSpace>, len: f64) -> anyhow::Result<DrivingCurve> {
    let sp = s.clone();
    Ok(DrivingCurve::from_fn(0.0, len, 1.0, move |t| {
        let a = t / sp.radius();
        sp.point_normalized(&[a.sin(), 0.0, a.cos()])
    })?)
}

pub(crate) fn pair_mode(cfg: &Config, default: PairMode) -> Result<PairMode, UsageError> {
    let scale = cfg.f64_or("pair_scale", 1e-2)?;
    match cfg.get("pair_mode") {
        None => Ok(default),
        Some("independent") => Ok(PairMode::Independent),
        Some("local") => Ok(PairMode::Local { scale }),
        Some("mixed") => Ok(PairMode::Mixed { scale }),
        Some(other) => Err(usage!("`pair_mode`: expected independent, local or mixed, got `{other}`")),
    }
}

pub(crate) fn lipschitz_options(seed: u64) -> LipschitzOptions {
    LipschitzOptions {
        seed,
        ..LipschitzOptions::default()
    }
}

/// `<prefix>lipschitz.csv` and `<prefix>lipschitz.json` for a report.
pub(crate) fn lipschitz_files(prefix: &str, rep: &LipschitzReport, tol: f64, tol_formula: &str) -> Vec<(String, String)> {
    let bins: Vec<_> = rep
        .bins
        .iter()
        .map(|b| json!({"lo": b.lo, "hi": b.hi, "count": b.count, "max_ratio": b.max_ratio}))
        .collect();
    let summary = json!({
        "pairs": rep.records.len() + rep.skipped + rep.failures,
        "evaluated": rep.records.len(),
        "skipped": rep.skipped,
        "failures": rep.failures,
        "first_failure": rep.first_failure,
        "max_ratio": finite(rep.max_ratio),
        "worst_pair": rep.worst_pair,
        "max_ratio_tolerance": finite(1.0 + tol),
        "tolerance_formula": tol_formula,
        "fitted_epsilon": rep.epsilon_hat.and_then(finite),
        "ci_low": rep.epsilon_ci.and_then(|c| finite(c.0)),
        "ci_high": rep.epsilon_ci.and_then(|c| finite(c.1)),
        "bins_nonincreasing": rep.bins_nonincreasing(),
        "bins": bins,
    });
    vec![
        (format!("{prefix}lipschitz.csv"), rep.to_csv()),
        (format!("{prefix}lipschitz.json"), format!("{:#}\n", summary)),
    ]
}

/// Max-ratio check against `1 + tol`; any failed evaluation fails it too.
pub(crate) fn lipschitz_check(id: &str, title: &str, rep: &LipschitzReport, tol: f64, tol_formula: &str) -> Check {
    let mut check = Check::at_most(id, title, rep.max_ratio, 1.0 + tol)
        .detail("pairs", rep.records.len())
        .detail("skipped", rep.skipped)
        .detail("failures", rep.failures)
        .detail("tolerance_formula", tol_formula);
    if rep.failures > 0 {
        check.passed = false;
        check = check.detail("first_failure", rep.first_failure.clone().unwrap_or_default());
    }
    check
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Trajectory plot: time axis for ℝ¹, first two coordinates for ℝⁿ,
/// orthographic view for spheres.
pub(crate) fn trajectory_svg(
    title: &str,
    traj: &Trajectory,
    gamma: &[Point],
    sphere_radius: Option<f64>,
) -> String {
    let coords = |p: &Point| p.flat_coords();
    match sphere_radius {
        Some(r) => {
            let to3 = |p: &Point| {
                let c = coords(p);
                [c[0], c[1], c[2]]
            };
            svg::sphere_plot(
                title,
                r,
                &[
                    ("trajectory".into(), "black", traj.points.iter().map(to3).collect()),
                    ("driving curve".into(), "red", gamma.iter().map(to3).collect()),
                ],
            )
        }
        None if traj.points.first().map_or(1, |p| coords(p).len()) == 1 => svg::axis_plot(
            title,
            "t",
            "x",
            &[
                Series::new(
                    "trajectory",
                    "black",
                    traj.times.iter().zip(&traj.points).map(|(t, p)| (*t, coords(p)[0])).collect(),
                ),
                Series::new(
                    "driving curve",
                    "red",
                    traj.times.iter().zip(gamma).map(|(t, p)| (*t, coords(p)[0])).collect(),
                )
                .dashed(),
            ],
        ),
        None => {
            let xy = |p: &Point| {
                let c = coords(p);
                (c[0], c[1])
            };
            svg::axis_plot(
                title,
                "x0",
                "x1",
                &[
                    Series::new("trajectory", "black", traj.points.iter().map(xy).collect()),
                    Series::new("driving curve", "red", gamma.iter().map(xy).collect()).dashed(),
                ],
            )
        }
    }
}
