//! `tractrix run`: one tractrix trajectory plus an optional refinement study.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use tractrix_core::spaces::{EuclideanSpace, SphereSpace};
use tractrix_core::tractrix::{ball_containment_excess, convergence_study, tractrix_flow, DrivingCurve};
use tractrix_core::{Point, Space};

use crate::config::{positive, usage, Common, Config};
use crate::manifest::Check;
use crate::{setup, Outputs};

/// A backend plus a way to turn configured coordinates into points.
pub(crate) struct Backend {
    pub space: Arc<dyn Space>,
    pub sphere: Option<Arc<SphereSpace>>,
    euclid: Option<Arc<EuclideanSpace>>,
}

impl Backend {
    pub fn point(&self, c: &[f64]) -> anyhow::Result<Point> {
        Ok(match (&self.sphere, &self.euclid) {
            (Some(s), _) => s.point_normalized(c)?,
            (_, Some(e)) => e.point(c)?,
            _ => unreachable!("backend has one space"),
        })
    }

    pub fn sphere_radius(&self) -> Option<f64> {
        self.sphere.as_ref().map(|s| s.radius())
    }
}

pub(crate) fn backend(cfg: &Config) -> anyhow::Result<Backend> {
    match cfg.str_or("space", "line") {
        "line" => Ok(euclid(1)),
        "euclidean" => {
            let dim = cfg.coords("gamma_from")?.map_or(2, |c| c.len());
            Ok(euclid(dim))
        }
        "sphere" => {
            let r = positive("sphere_radius", cfg.f64_or("sphere_radius", 1.0)?)?;
            let dim = cfg.coords("gamma_from")?.map_or(2, |c| c.len().saturating_sub(1));
            let s = Arc::new(SphereSpace::new(dim, r)?);
            Ok(Backend {
                space: s.clone(),
                sphere: Some(s),
                euclid: None,
            })
        }
        other => Err(usage!("`space`: expected line, euclidean or sphere, got `{other}`").into()),
    }
}

fn euclid(dim: usize) -> Backend {
    let e = Arc::new(EuclideanSpace::new(dim));
    Backend {
        space: e.clone(),
        sphere: None,
        euclid: Some(e),
    }
}

pub(crate) fn run(cfg: &Config, common: &Common, out: &mut Outputs) -> anyhow::Result<Vec<Check>> {
    let b = backend(cfg)?;
    let sphere = b.sphere_radius();
    let dim = match (&b.sphere, &b.euclid) {
        (Some(s), _) => s.ambient_dim(),
        (_, Some(e)) => e.dim(),
        _ => unreachable!(),
    };
    let north: Vec<f64> = (0..dim).map(|i| if i + 1 == dim { 1.0 } else { 0.0 }).collect();
    let (from_default, to_default, t1_default, r_default) = match sphere {
        Some(rad) => {
            let mut east = vec![0.0; dim];
            east[0] = 1.0;
            (north.clone(), east, rad * FRAC_PI_2, rad * FRAC_PI_2)
        }
        None if dim == 1 => (vec![0.0], vec![5.0], 5.0, 1.0),
        None => {
            let mut to = vec![0.0; dim];
            to[0] = 5.0;
            (vec![0.0; dim], to, 5.0, 1.0)
        }
    };
    let t0 = cfg.f64_or("t0", 0.0)?;
    let t1 = cfg.f64_or("t1", t1_default)?;
    if !(t1 > t0) {
        return Err(usage!("`t1` must exceed `t0`").into());
    }
    let from = cfg.coords_or("gamma_from", &from_default)?;
    let to = cfg.coords_or("gamma_to", &to_default)?;
    let r = cfg.f64_or("radius", r_default)?;
    if r < 0.0 {
        return Err(usage!("`radius` must be nonnegative").into());
    }
    let delta = common.delta.unwrap_or(1e-3);
    let scale = common.tolerance_scale;
    let start = cfg.coords_or("start", if sphere.is_some() { &north } else { &from })?;

    let (pa, pb) = (b.point(&from)?, b.point(&to)?);
    let gamma = if pa == pb {
        DrivingCurve::stationary(pa, t0, t1)?
    } else {
        DrivingCurve::geodesic(b.space.clone(), pa, pb, t0, t1)?
    };
    let p = b.point(&start)?;
    let traj = tractrix_flow(&*b.space, &gamma, r, delta, &p)?;
    let gamma_pts: Vec<Point> = traj.times.iter().map(|t| gamma.at(*t)).collect::<Result<_, _>>()?;
    out.write("trajectory.csv", &traj.to_csv())?;
    let mut gamma_csv = String::from("t");
    for i in 0..gamma_pts.first().map_or(0, |q| q.flat_coords().len()) {
        gamma_csv.push_str(&format!(",x{i}"));
    }
    gamma_csv.push('\n');
    for (t, q) in traj.times.iter().zip(&gamma_pts) {
        gamma_csv.push_str(&t.to_string());
        for c in q.flat_coords() {
            gamma_csv.push_str(&format!(",{c}"));
        }
        gamma_csv.push('\n');
    }
    out.write("gamma.csv", &gamma_csv)?;
    out.write(
        "trajectory.svg",
        &setup::trajectory_svg("tractrix trajectory", &traj, &gamma_pts, sphere),
    )?;

    let mut checks = vec![Check::flag("complete", "trajectory reached the end time", traj.diagnostic.is_none())
        .detail("diagnostic", traj.diagnostic.clone().unwrap_or_else(|| "none".into()))];
    let contain = ball_containment_excess(&*b.space, &gamma, r, &traj)?;
    checks.push(Check::at_most("containment", "max d(p_i, γ(t_i)) - r", contain, 1e-9 * scale));
    let speed = traj.speed_excess(&*b.space, gamma.lipschitz())?;
    checks.push(Check::at_most("speed", "max step length - L·Δt", speed, 1e-9 * scale));

    if let Some(e) = cfg.coords("expect_end")? {
        let want = b.point(&e)?;
        let got = traj.last().expect("trajectory has its start point");
        let tol = cfg.f64_or("expect_tol", 2.0 * delta)? * scale;
        checks.push(
            Check::at_most("end", "distance of the end point to expect_end", b.space.distance(got, &want)?, tol)
                .detail("end_point", fmt_coords(got)),
        );
    }

    if let Some(s2) = cfg.coords("start2")? {
        let q = b.point(&s2)?;
        let traj2 = tractrix_flow(&*b.space, &gamma, r, delta, &q)?;
        out.write("trajectory2.csv", &traj2.to_csv())?;
        let before = b.space.distance(&p, &q)?;
        let after = b.space.distance(traj.last().expect("nonempty"), traj2.last().expect("nonempty"))?;
        let tol = cfg.f64_or("max_ratio_tol", 5e-3)? * scale;
        checks.push(
            Check::at_most("ratio", "d(φ(p), φ(q)) / d(p, q)", after / before, 1.0 + tol)
                .detail("d_before", before)
                .detail("d_after", after),
        );
    }

    if let Some(text) = cfg.get("convergence_deltas") {
        let deltas = crate::config::list("convergence_deltas", text)?;
        let mut probes = vec![p.clone()];
        if let Some(s2) = cfg.coords("start2")? {
            probes.push(b.point(&s2)?);
        }
        let rep = convergence_study(&*b.space, &gamma, r, &probes, &deltas)?;
        out.write("convergence.csv", &convergence_csv(&rep))?;
        let min_order = cfg.f64_or("min_order", 0.5)?;
        let mut c = Check::at_least(
            "order",
            "fitted convergence order",
            rep.order.unwrap_or(f64::NAN),
            min_order / scale,
        );
        for row in &rep.rows {
            c = c.detail(&format!("sup_deviation@{}", row.delta), row.sup_deviation);
        }
        checks.push(c);
    }
    Ok(checks)
}

pub(crate) fn convergence_csv(rep: &tractrix_core::tractrix::ConvergenceReport) -> String {
    let mut s = String::from("delta,sup_deviation\n");
    for row in &rep.rows {
        s.push_str(&format!("{},{}\n", row.delta, row.sup_deviation));
    }
    s
}

fn fmt_coords(p: &Point) -> String {
    p.flat_coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}
