//! `tractrix retract`: Lipschitz sampling and fixed-point checks for the
//! cone, phi, psi and radial retractions.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::Arc;

use tractrix_core::glued::{ArcInterface, Interface, SampledInterface};
use tractrix_core::retract::{ConeRetraction, ConeSet, PhiPipeline, PsiPipeline, RadialMap};
use tractrix_core::sampling::{self, sample_pairs, CapSampler, PairMode, PointSampler, ProductSampler};
use tractrix_core::spaces::SphereSpace;
use tractrix_core::tractrix::{estimate_lipschitz, PointMap};
use tractrix_core::{Point, Space};

use crate::config::{positive, usage, Common, Config};
use crate::manifest::Check;
use crate::{setup, Outputs};

pub(crate) fn run(cfg: &Config, common: &Common, out: &mut Outputs) -> anyhow::Result<Vec<Check>> {
    let p_coords = cfg.coords_or("p", &[0.0, 0.0, 1.0])?;
    if p_coords.len() < 2 {
        return Err(usage!("`p` needs at least two coordinates").into());
    }
    let sphere = Arc::new(SphereSpace::unit(p_coords.len() - 1));
    let p = sphere.point_normalized(&p_coords)?;
    let delta = common.delta.unwrap_or(1e-3);
    let scale = common.tolerance_scale;
    match cfg.str_or("pipeline", "cone") {
        "cone" => cone(cfg, common, out, sphere, p),
        "phi" => phi(cfg, common, out, sphere, p, delta),
        "psi" => psi(cfg, common, out, sphere, p, delta),
        "radial" => {
            let map = RadialMap::new(sphere.clone(), p.clone())?;
            let sampler = CapSampler::new(sphere.clone(), p.clone(), PI)?;
            let fixed = CapSampler::new(sphere.clone(), p, FRAC_PI_2)?;
            let mut checks = lipschitz(cfg, common, out, &map, &sampler, 10_000, 1e-9, "1e-9")?;
            checks.push(fixed_points(cfg, common, out, &map, &fixed, 1e-12 * scale)?);
            Ok(checks)
        }
        other => Err(usage!("`pipeline`: expected cone, phi, psi or radial, got `{other}`").into()),
    }
}

fn cone(
    cfg: &Config,
    common: &Common,
    out: &mut Outputs,
    sphere: Arc<SphereSpace>,
    p: Point,
) -> anyhow::Result<Vec<Check>> {
    let set = cone_set(cfg, sphere.ambient_dim())?;
    let map = ConeRetraction::new(sphere.clone(), set, &p)?;
    let radius = cfg.f64_or("domain_radius", PI)?;
    let sampler = CapSampler::new(sphere, p, radius)?;
    let mut checks = lipschitz(cfg, common, out, &map, &sampler, 10_000, 1e-6, "1e-6")?;
    let tol = cfg.f64_or("fixed_tol", 1e-9)? * common.tolerance_scale;
    checks.push(image_fixed(cfg, common, out, &map, &sampler, tol, |x| map.in_k(x, 1e-9))?);
    Ok(checks)
}

pub(crate) fn cone_set(cfg: &Config, dim: usize) -> anyhow::Result<ConeSet> {
    let s = FRAC_1_SQRT_2;
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    a[0] = s;
    b[0] = -s;
    a[dim - 1] = s;
    b[dim - 1] = s;
    Ok(match cfg.str_or("k_kind", "sector") {
        "sector" => ConeSet::sector(&cfg.coords_or("k_a", &a)?, &cfg.coords_or("k_b", &b)?)?,
        "ray" => ConeSet::ray(&cfg.coords_or("k_a", &a)?)?,
        "circular" => {
            let mut north = vec![0.0; dim];
            north[dim - 1] = 1.0;
            ConeSet::circular(&cfg.coords_or("k_axis", &north)?, cfg.f64_or("k_half_angle", PI / 8.0)?)?
        }
        "halfspaces" => {
            let normals = cfg
                .vectors("k_normals")?
                .ok_or_else(|| usage!("`k_kind = halfspaces` needs `k_normals`"))?;
            ConeSet::halfspaces(&normals)?
        }
        other => return Err(usage!("`k_kind`: expected sector, ray, circular or halfspaces, got `{other}`").into()),
    })
}

/// The interface for the phi pipeline: a gate file or a geodesic arc.
pub(crate) fn interface(cfg: &Config, u: &Arc<SphereSpace>, p: &Point) -> anyhow::Result<Arc<dyn Interface>> {
    let uu: Arc<dyn Space> = u.clone();
    if let Some(path) = cfg.get("gate_file") {
        let text = std::fs::read_to_string(path).map_err(|e| usage!("cannot read gate file {path}: {e}"))?;
        let rows = SampledInterface::parse_rows(&text)?;
        let points = rows.iter().map(|r| u.point_normalized(r)).collect::<Result<Vec<_>, _>>()?;
        let mesh = positive("gate_mesh", cfg.opt_f64("gate_mesh")?.ok_or_else(|| usage!("`gate_file` needs `gate_mesh`"))?)?;
        return Ok(Arc::new(SampledInterface::new(uu, points, mesh)?));
    }
    let mut east = vec![0.0; u.ambient_dim()];
    east[0] = 1.0;
    let start = match cfg.coords("k_start")? {
        Some(c) => u.point_normalized(&c)?,
        None => p.clone(),
    };
    let end = u.point_normalized(&cfg.coords_or("k_end", &east)?)?;
    Ok(Arc::new(ArcInterface::new(uu, start, end)?))
}

fn phi(
    cfg: &Config,
    common: &Common,
    out: &mut Outputs,
    sphere: Arc<SphereSpace>,
    p: Point,
    delta: f64,
) -> anyhow::Result<Vec<Check>> {
    let eps_k = positive("eps_k", cfg.f64_or("eps_k", PI / 200.0)?)?;
    let iface = interface(cfg, &sphere, &p)?;
    let pipe = PhiPipeline::new(sphere.clone(), iface.clone(), p.clone(), eps_k, delta)?;
    let radius = cfg.f64_or("domain_radius", FRAC_PI_2)?;
    let sampler = CapSampler::new(sphere.clone(), p, radius)?;
    let tol = cfg.f64_or("max_ratio_tol", 1e-2)?;
    let mut checks = lipschitz(cfg, common, out, &pipe, &sampler, 250, tol, &format!("{tol} (δ = {delta}, ε_K = {eps_k})"))?;
    let ks: Vec<Point> = iface
        .samples(eps_k / 2.0)?
        .iter()
        .map(|k| iface.embed(k))
        .collect::<Result<_, _>>()?;
    let n = cfg.usize_or("fixed_probes", ks.len())?.min(ks.len());
    let ks = &ks[..n];
    let (res, _) = pipe.evaluate_many(ks);
    let mut table = String::from("probe,error,snap\n");
    let mut worst: f64 = 0.0;
    for (i, (k, r)) in ks.iter().zip(res).enumerate() {
        let o = r?;
        let e = sphere.distance(k, &o.point)?;
        worst = worst.max(e);
        table.push_str(&format!("{i},{e},{}\n", o.snap));
    }
    out.write("fixed_points.csv", &table)?;
    let tol = cfg.f64_or("fixed_tol", pipe.fixed_point_tolerance())? * common.tolerance_scale;
    checks.push(
        Check::at_most("fixed", "max d(Φ(k), k) over K samples", worst, tol)
            .detail("probes", n)
            .detail("tolerance_formula", "2δ + 2ε_K"),
    );
    Ok(checks)
}

fn psi(
    cfg: &Config,
    common: &Common,
    out: &mut Outputs,
    sphere: Arc<SphereSpace>,
    p: Point,
    delta: f64,
) -> anyhow::Result<Vec<Check>> {
    let eps_k = positive("eps_k", cfg.f64_or("eps_k", PI / 20.0)?)?;
    let cap = cfg.f64_or("cap_radius", FRAC_PI_2)?;
    let pipe = PsiPipeline::new(sphere.clone(), p.clone(), cap, eps_k, delta)?;
    let factor: Arc<dyn PointSampler> = Arc::new(CapSampler::new(sphere, p, cap)?);
    let sampler = ProductSampler::new(pipe.product().clone(), factor.clone(), factor.clone());
    let tol = cfg.f64_or("max_ratio_tol", 1e-2)?;
    let mut checks = lipschitz(cfg, common, out, &pipe, &sampler, 250, tol, &format!("{tol} (δ = {delta}, ε_K = {eps_k})"))?;
    let n = cfg.usize_or("fixed_probes", 100)?;
    let mut rng = sampling::rng(common.seed.wrapping_add(1));
    let probes: Vec<Point> = (0..n)
        .map(|_| {
            let x = factor.sample(&mut rng)?;
            pipe.pair(x.clone(), x)
        })
        .collect::<Result<_, _>>()?;
    let (res, _) = pipe.evaluate_many(&probes);
    let mut table = String::from("probe,error,snap\n");
    let mut worst: f64 = 0.0;
    for (i, (x, r)) in probes.iter().zip(res).enumerate() {
        let (y, snap) = r?;
        let e = pipe.product().distance(x, &y)?;
        worst = worst.max(e);
        table.push_str(&format!("{i},{e},{snap}\n"));
    }
    out.write("fixed_points.csv", &table)?;
    let tol = cfg.f64_or("fixed_tol", 1e-12)? * common.tolerance_scale;
    checks.push(Check::at_most("fixed", "max d(Ψ(x, x), (x, x)) over diagonal probes", worst, tol).detail("probes", n));
    Ok(checks)
}

#[allow(clippy::too_many_arguments)]
fn lipschitz(
    cfg: &Config,
    common: &Common,
    out: &mut Outputs,
    map: &dyn PointMap,
    sampler: &dyn PointSampler,
    default_pairs: usize,
    default_tol: f64,
    formula: &str,
) -> anyhow::Result<Vec<Check>> {
    let n = cfg.usize_or("pairs", default_pairs)?;
    let mode = setup::pair_mode(cfg, PairMode::Independent)?;
    let tol = cfg.f64_or("max_ratio_tol", default_tol)? * common.tolerance_scale;
    let pairs = sample_pairs(sampler, mode, n, &mut sampling::rng(common.seed))?;
    let rep = estimate_lipschitz(map, &pairs, &setup::lipschitz_options(common.seed))?;
    for (name, contents) in setup::lipschitz_files("", &rep, tol, formula) {
        out.write(&name, &contents)?;
    }
    Ok(vec![setup::lipschitz_check("max_ratio", "max sampled Lipschitz ratio", &rep, tol, formula)])
}

/// Idempotence on sampled images: `d(R(R(x)), R(x))`, plus a membership
/// test for each image.
fn image_fixed(
    cfg: &Config,
    common: &Common,
    out: &mut Outputs,
    map: &dyn PointMap,
    sampler: &dyn PointSampler,
    tol: f64,
    member: impl Fn(&Point) -> tractrix_core::Result<bool>,
) -> anyhow::Result<Check> {
    let n = cfg.usize_or("fixed_probes", 1000)?;
    let mut rng = sampling::rng(common.seed.wrapping_add(1));
    let xs: Vec<Point> = (0..n).map(|_| sampler.sample(&mut rng)).collect::<Result<_, _>>()?;
    let images: Vec<Point> = map.apply_many(&xs).into_iter().collect::<Result<_, _>>()?;
    let again = map.apply_many(&images);
    let mut table = String::from("probe,error,in_k\n");
    let mut worst: f64 = 0.0;
    let mut outside = 0;
    for (i, (y, z)) in images.iter().zip(again).enumerate() {
        let e = map.target().distance(y, &z?)?;
        let inside = member(y)?;
        outside += usize::from(!inside);
        worst = worst.max(e);
        table.push_str(&format!("{i},{e},{inside}\n"));
    }
    out.write("fixed_points.csv", &table)?;
    let mut c = Check::at_most("fixed", "max d(R(y), y) over images y = R(x)", worst, tol)
        .detail("probes", n)
        .detail("images_outside_k", outside);
    c.passed &= outside == 0;
    Ok(c)
}

/// Points of `fixed` must be left in place.
fn fixed_points(
    cfg: &Config,
    common: &Common,
    out: &mut Outputs,
    map: &dyn PointMap,
    fixed: &dyn PointSampler,
    tol: f64,
) -> anyhow::Result<Check> {
    let n = cfg.usize_or("fixed_probes", 1000)?;
    let mut rng = sampling::rng(common.seed.wrapping_add(1));
    let xs: Vec<Point> = (0..n).map(|_| fixed.sample(&mut rng)).collect::<Result<_, _>>()?;
    let mut table = String::from("probe,error\n");
    let mut worst: f64 = 0.0;
    for (i, (x, y)) in xs.iter().zip(map.apply_many(&xs)).enumerate() {
        let e = map.target().distance(x, &y?)?;
        worst = worst.max(e);
        table.push_str(&format!("{i},{e}\n"));
    }
    out.write("fixed_points.csv", &table)?;
    Ok(Check::at_most("fixed", "max d(R(x), x) on the target ball", worst, tol).detail("probes", n))
}
