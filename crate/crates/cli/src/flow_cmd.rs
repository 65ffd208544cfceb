//! `tractrix flow`: gradient curves of time-dependent families with EVI and
//! distance-estimate reports.

use std::sync::Arc;

use serde_json::json;
use tractrix_core::flow::{
    check_evi, evolve, verify_distance_estimate, EstimateReport, EviReport, QuadraticFamily, TimeDependentFamily,
    TractrixFamily, Trajectory,
};
use tractrix_core::spaces::EuclideanSpace;
use tractrix_core::tractrix::DrivingCurve;
use tractrix_core::{Point, Space};

use crate::config::{usage, Common, Config};
use crate::manifest::Check;
use crate::svg::{self, Series};
use crate::Outputs;

pub(crate) fn run(cfg: &Config, common: &Common, out: &mut Outputs) -> anyhow::Result<Vec<Check>> {
    match cfg.str_or("family", "quadratic") {
        "quadratic" => quadratic(cfg, common, out, false),
        "shifted" => quadratic(cfg, common, out, true),
        "drag" => drag(cfg, common, out),
        other => Err(usage!("`family`: expected quadratic, shifted or drag, got `{other}`").into()),
    }
}

fn points(space: &EuclideanSpace, rows: &[Vec<f64>]) -> anyhow::Result<Vec<Point>> {
    Ok(rows.iter().map(|r| space.point(r)).collect::<Result<_, _>>()?)
}

/// Moves the middle point of `traj` by `amount` along the first axis.
pub(crate) fn corrupt(space: &EuclideanSpace, traj: &mut Trajectory, amount: f64) -> anyhow::Result<usize> {
    let k = traj.len() / 2;
    let mut c = traj.points[k].flat_coords();
    c[0] += amount;
    traj.points[k] = space.point(&c)?;
    Ok(k)
}

pub(crate) fn evi_check(id: &str, rep: &EviReport) -> Check {
    let mut c = Check::at_least(id, "worst EVI slack", rep.worst_slack, -rep.tolerance)
        .detail("worst_step", rep.worst_step)
        .detail("worst_witness", rep.worst_witness)
        .detail("checked", rep.checked)
        .detail("skipped", rep.skipped)
        .detail("violations", rep.violations);
    c.passed &= rep.passed();
    c
}

pub(crate) fn evi_json(rep: &EviReport) -> serde_json::Value {
    json!({
        "worst_slack": rep.worst_slack,
        "tolerance": rep.tolerance,
        "worst_step": rep.worst_step,
        "worst_witness": rep.worst_witness,
        "checked": rep.checked,
        "skipped": rep.skipped,
        "violations": rep.violations,
        "passed": rep.passed(),
    })
}

pub(crate) fn estimate_check(id: &str, rep: &EstimateReport) -> Check {
    let mut c = Check::at_most(id, "worst excess of ℓ(t) over the bound", rep.worst_excess, rep.allowed)
        .detail("worst_time", rep.worst_time)
        .detail("samples", rep.samples)
        .detail("extension", rep.extension);
    c.passed &= rep.passed();
    c
}

pub(crate) fn estimate_json(rep: &EstimateReport) -> serde_json::Value {
    json!({
        "worst_excess": rep.worst_excess,
        "allowed": rep.allowed,
        "worst_time": rep.worst_time,
        "samples": rep.samples,
        "extension": rep.extension,
        "passed": rep.passed(),
    })
}

/// `max_t |ℓ(t) - ℓ(a)·e^{-(t-a)}|` for two curves on the same times.
pub(crate) fn exponential_deviation(space: &dyn Space, a: &Trajectory, b: &Trajectory) -> anyhow::Result<f64> {
    let l0 = space.distance(&a.points[0], &b.points[0])?;
    let t0 = a.times[0];
    let mut worst: f64 = 0.0;
    for ((t, p), q) in a.times.iter().zip(&a.points).zip(&b.points) {
        let l = space.distance(p, q)?;
        worst = worst.max((l - l0 * (-(t - t0)).exp()).abs());
    }
    Ok(worst)
}

fn quadratic(cfg: &Config, common: &Common, out: &mut Outputs, shifted: bool) -> anyhow::Result<Vec<Check>> {
    let center = cfg.coords_or("center", &[0.0, 0.0, 0.0])?;
    let space = Arc::new(EuclideanSpace::new(center.len()));
    let radius = cfg.f64_or("domain_radius", 2.0)?;
    let f = QuadraticFamily::new(space.clone(), &center, radius)?;
    let delta = common.delta.unwrap_or(if shifted { 1e-3 } else { 1e-4 });
    let scale = common.tolerance_scale;
    let (t0, t1) = (cfg.f64_or("t0", 0.0)?, cfg.f64_or("t1", if shifted { 2.0 } else { 1.0 })?);
    let start = space.point(&cfg.coords_or("start", &[1.0, 0.0, 0.0])?)?;

    let (h, start2) = if shifted {
        let c2 = cfg.coords_or("center2", &[0.049, 0.0, 0.0])?;
        let h = QuadraticFamily::new(space.clone(), &c2, radius)?;
        (h, space.point(&cfg.coords_or("start2", &start.flat_coords())?)?)
    } else {
        (f.clone(), space.point(&cfg.coords_or("start2", &[0.0, 0.5, 0.5])?)?)
    };
    let s = if shifted { f.sup_difference(&h) } else { 0.0 };
    let mut a = evolve(&f, &start, t0, t1, delta)?;
    let b = evolve(&h, &start2, t0, t1, delta)?;
    for (name, tr) in [("a", &a), ("b", &b)] {
        if let Some(d) = &tr.diagnostic {
            return Err(anyhow::anyhow!("trajectory {name} stopped: {d}"));
        }
        if let Some(t) = tr.escape {
            return Err(tractrix_core::GeomError::precondition("curve left the domain", format!("trajectory {name} at t = {t}")).into());
        }
    }
    if let Some(c) = cfg.opt_f64("corrupt")? {
        corrupt(&space, &mut a, c * delta)?;
    }
    out.write("trajectory_a.csv", &a.to_csv())?;
    out.write("trajectory_b.csv", &b.to_csv())?;
    out.write("trajectory.svg", &pair_svg(&a, &b))?;

    let witnesses = match cfg.vectors("witnesses")? {
        Some(w) => w,
        None => vec![vec![1.0, 1.0, 1.0], vec![-1.0, 0.0, 0.5], vec![0.0, -1.0, 0.0]],
    };
    let witnesses = points(&space, &witnesses)?;
    let evi_tol = cfg.f64_or("evi_tol", 10.0)? * delta * scale;
    let evi_a = check_evi(&a, &f, &witnesses, evi_tol)?;
    let evi_b = check_evi(&b, &h, &witnesses, evi_tol)?;
    out.write(
        "evi.json",
        &format!("{:#}\n", json!({"trajectory_a": evi_json(&evi_a), "trajectory_b": evi_json(&evi_b)})),
    )?;

    let c = cfg.f64_or("estimate_c", 1.0)? * scale;
    let est = verify_distance_estimate(&*space, &a, &b, f.lambda(), s, c)?;
    let mut summary = json!({
        "lambda": f.lambda(),
        "s": s,
        "delta": delta,
        "estimate": estimate_json(&est),
    });
    let mut checks = vec![evi_check("evi_a", &evi_a), evi_check("evi_b", &evi_b), estimate_check("estimate", &est)];
    if !shifted {
        let dev = exponential_deviation(&*space, &a, &b)?;
        let tol = cfg.f64_or("estimate_tol", 1e-4)? * scale;
        summary["exponential_law"] = json!({"max_deviation": dev, "tolerance": tol});
        checks.push(Check::at_most("exponential", "max |ℓ(t) - ℓ(a)·e^{-(t-a)}|", dev, tol));
    }
    out.write("estimate.json", &format!("{:#}\n", summary))?;
    Ok(checks)
}

pub(crate) fn drag_family(r: f64, t1: f64) -> anyhow::Result<(Arc<EuclideanSpace>, TractrixFamily)> {
    let line = Arc::new(EuclideanSpace::new(1));
    let gamma = DrivingCurve::geodesic(line.clone(), line.point(&[0.0])?, line.point(&[t1])?, 0.0, t1)?;
    let fam = TractrixFamily::new(line.clone(), gamma, r, 100.0)?;
    Ok((line, fam))
}

fn drag(cfg: &Config, common: &Common, out: &mut Outputs) -> anyhow::Result<Vec<Check>> {
    let t1 = cfg.f64_or("t1", 5.0)?;
    let r = cfg.f64_or("radius", 0.0)?;
    let (line, fam) = drag_family(r, t1)?;
    let delta = common.delta.unwrap_or(1e-3);
    let start = line.point(&cfg.coords_or("start", &[0.0])?)?;
    let mut traj = evolve(&fam, &start, 0.0, t1, delta)?;
    let corrupted = match cfg.opt_f64("corrupt")? {
        Some(c) => Some(corrupt(&line, &mut traj, c * delta)?),
        None => None,
    };
    out.write("trajectory_a.csv", &traj.to_csv())?;
    let gamma: Vec<(f64, f64)> = traj.times.iter().map(|t| (*t, *t)).collect();
    let path: Vec<(f64, f64)> = traj.times.iter().zip(&traj.points).map(|(t, p)| (*t, p.flat_coords()[0])).collect();
    out.write(
        "trajectory.svg",
        &svg::axis_plot(
            "drag flow",
            "t",
            "x",
            &[Series::new("trajectory", "black", path), Series::new("driving curve", "red", gamma).dashed()],
        ),
    )?;
    let witnesses = match cfg.vectors("witnesses")? {
        Some(w) => w,
        None => vec![vec![-1.0], vec![2.0], vec![5.0]],
    };
    let witnesses = points(&line, &witnesses)?;
    let tol = cfg.f64_or("evi_tol", 10.0)? * delta * common.tolerance_scale;
    let rep = check_evi(&traj, &fam, &witnesses, tol)?;
    let mut report = json!({"trajectory_a": evi_json(&rep)});
    if let Some(k) = corrupted {
        report["corrupted_step"] = json!(k);
    }
    out.write("evi.json", &format!("{:#}\n", report))?;
    Ok(vec![evi_check("evi", &rep)])
}

fn pair_svg(a: &Trajectory, b: &Trajectory) -> String {
    let xy = |t: &Trajectory| -> Vec<(f64, f64)> {
        t.points
            .iter()
            .map(|p| {
                let c = p.flat_coords();
                (c[0], c.get(1).copied().unwrap_or(0.0))
            })
            .collect()
    };
    svg::axis_plot(
        "gradient curves",
        "x0",
        "x1",
        &[Series::new("curve a", "black", xy(a)), Series::new("curve b", "blue", xy(b))],
    )
}
