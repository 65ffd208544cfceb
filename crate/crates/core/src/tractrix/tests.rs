use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::*;
use crate::sampling::{self, sample_pairs, CapSampler, PairMode};
use crate::spaces::{EuclideanSpace, SphereSpace};

fn drag_line(b: f64) -> (Arc<EuclideanSpace>, DrivingCurve) {
    let space = Arc::new(EuclideanSpace::new(1));
    let s = space.clone();
    let gamma = DrivingCurve::from_fn(0.0, b, 1.0, move |t| s.point(&[t])).unwrap();
    (space, gamma)
}

/// Meridian from the north pole to the equator, unit speed.
fn meridian(s2: &Arc<SphereSpace>) -> DrivingCurve {
    let s = s2.clone();
    DrivingCurve::from_fn(0.0, FRAC_PI_2 * s2.radius(), 1.0, move |t| {
        let a = t / s.radius();
        s.point_normalized(&[a.sin(), 0.0, a.cos()])
    })
    .unwrap()
}

#[test]
fn collar_lambda_values() {
    assert_eq!(collar_lambda(0.0, 1.0, 0.1), 0.0);
    assert_eq!(collar_lambda(1.0, 1.0, 0.1), 0.0);
    let l = collar_lambda(1.0, FRAC_PI_2, 0.01);
    assert!((l - 0.01f64.tan()).abs() < 1e-15);
    assert!(collar_lambda(1.0, FRAC_PI_2, 1e-4) < l);
}

#[test]
fn partition_times_nest() {
    let p = Partition::with_step(0.0, 5.0, 1e-3).unwrap();
    assert_eq!(p.steps(), 5000);
    let q = p.refined();
    for i in 0..=p.steps() {
        assert_eq!(p.time(i), q.time(2 * i));
    }
    assert_eq!(p.time(p.steps()), 5.0);
    assert_eq!(Partition::with_step(1.0, 1.0, 0.1).unwrap().steps(), 0);
    assert!(Partition::with_step(0.0, 1.0, 0.0).is_err());
}

#[test]
fn drag_on_a_line() {
    let (space, gamma) = drag_line(5.0);
    let traj = tractrix_flow(&*space, &gamma, 1.0, 1e-3, &space.origin()).unwrap();
    assert!(traj.is_complete());
    for (t, p) in traj.times.iter().zip(&traj.points) {
        let exact = (t - 1.0).max(0.0);
        assert!((p.flat_coords()[0] - exact).abs() <= 2e-3);
    }
    assert!((traj.last().unwrap().flat_coords()[0] - 4.0).abs() <= 2e-3);
}

#[test]
fn gradient_realisation_agrees_on_a_line() {
    let (space, gamma) = drag_line(5.0);
    let delta = 1e-3;
    let a = tractrix_flow(&*space, &gamma, 1.0, delta, &space.origin()).unwrap();
    let b = tractrix_flow_gradient(space.clone(), &gamma, 1.0, delta, 0.5, &space.origin()).unwrap();
    assert!(a.sup_distance(&b, &*space).unwrap() <= 4.0 * delta);
}

#[test]
fn stationary_driver_leaves_points_alone() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = DrivingCurve::stationary(s2.pole(), 0.0, 1.0).unwrap();
    let p = s2.from_angles(1.2, 0.4).unwrap();
    let traj = tractrix_flow(&*s2, &gamma, FRAC_PI_2, 0.01, &p).unwrap();
    assert!(traj.points.iter().all(|q| *q == p));
    let g = tractrix_flow_gradient(s2.clone(), &gamma, FRAC_PI_2, 0.01, 0.01, &p).unwrap();
    assert!(g.points.iter().all(|q| *q == p));
}

#[test]
fn start_outside_the_ball_is_rejected() {
    let (space, gamma) = drag_line(5.0);
    let p = space.point(&[1.5]).unwrap();
    assert!(tractrix_flow(&*space, &gamma, 1.0, 0.01, &p).unwrap_err().is_precondition());
    assert!(tractrix_flow(&*space, &gamma, 0.0, 0.01, &space.origin()).is_err());
    let s2 = SphereSpace::unit(2);
    let g = DrivingCurve::stationary(s2.pole(), 0.0, 1.0).unwrap();
    assert!(tractrix_flow(&s2, &g, PI, 0.01, &s2.pole()).is_err());
}

#[test]
fn meridian_drag_stays_in_the_moving_ball() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = meridian(&s2);
    let p = s2.from_angles(FRAC_PI_2, 2.5).unwrap();
    for delta in [1e-2, 5e-3] {
        let traj = tractrix_flow(&*s2, &gamma, FRAC_PI_2, delta, &p).unwrap();
        assert!(ball_containment_excess(&*s2, &gamma, FRAC_PI_2, &traj).unwrap() <= 1e-9);
        assert!(thread_increase(&*s2, &gamma, FRAC_PI_2, &traj, 1e-9).unwrap() <= 1e-9);
        let end = gamma.at(FRAC_PI_2).unwrap();
        assert!(s2.distance(traj.last().unwrap(), &end).unwrap() <= FRAC_PI_2 + 2.0 * delta);
    }
}

#[test]
fn gradient_realisation_agrees_on_the_sphere() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = meridian(&s2);
    let delta = 1e-3;
    for (th, ph) in [(1.4, 2.5), (0.7, 3.0), (1.5, -1.0)] {
        let p = s2.from_angles(th, ph).unwrap();
        let a = tractrix_flow(&*s2, &gamma, FRAC_PI_2, delta, &p).unwrap();
        let b = tractrix_flow_gradient(s2.clone(), &gamma, FRAC_PI_2, delta, 0.01, &p).unwrap();
        assert!(b.is_complete(), "{:?}", b.diagnostic);
        assert!(a.sup_distance(&b, &*s2).unwrap() <= 10.0 * delta);
    }
}

#[test]
fn flow_map_at_start_is_identity() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = meridian(&s2);
    let m = FlowMap::new(s2.clone(), gamma.clone(), FRAC_PI_2, 0.01, 0.0).unwrap();
    assert_eq!(m.partition().steps(), 0);
    let p = s2.from_angles(1.0, 1.0).unwrap();
    assert_eq!(m.apply(&p).unwrap(), p);
    assert!(FlowMap::new(s2, gamma, FRAC_PI_2, 0.01, 2.0).is_err());
}

#[test]
fn flow_restarts_compose() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = meridian(&s2);
    let delta = 1e-3;
    let p = s2.from_angles(1.3, 2.8).unwrap();
    let full = FlowMap::new(s2.clone(), gamma.clone(), FRAC_PI_2, delta, 1.2).unwrap();
    let first = FlowMap::new(s2.clone(), gamma.clone(), FRAC_PI_2, delta, 0.5).unwrap();
    let second = FlowMap::new(s2.clone(), gamma.restrict(0.5, 1.2).unwrap(), FRAC_PI_2, delta, 1.2)
        .unwrap();
    let direct = full.apply(&p).unwrap();
    let composed = second.apply(&first.apply(&p).unwrap()).unwrap();
    assert!(s2.distance(&direct, &composed).unwrap() <= 5.0 * delta);
}

#[test]
fn decreasing_balls_fix_the_final_ball() {
    // Balls of radius π/2 around a stationary centre, then a shrinking
    // family modelled by r = 1 around a point moving towards the centre of
    // the last ball: points of B̄_b stay fixed.
    let s2 = Arc::new(SphereSpace::unit(2));
    let start = s2.from_angles(0.3, 0.0).unwrap();
    let gamma =
        DrivingCurve::geodesic(s2.clone(), start, s2.pole(), 0.0, 1.0).unwrap();
    let m = FlowMap::new(s2.clone(), gamma, 1.0, 1e-3, 1.0).unwrap();
    let mut rng = sampling::rng(5);
    let sampler = CapSampler::new(s2.clone(), s2.pole(), 0.7).unwrap();
    for _ in 0..50 {
        let p = crate::sampling::PointSampler::sample(&sampler, &mut rng).unwrap();
        let q = m.apply(&p).unwrap();
        assert!(s2.distance(&p, &q).unwrap() <= 2e-3);
    }
}

#[test]
fn convergence_order_on_the_sphere() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = meridian(&s2);
    let probes: Vec<Point> = [(1.4, 2.5), (1.0, 3.1), (1.57, 1.7), (0.4, -2.0)]
        .iter()
        .map(|&(t, p)| s2.from_angles(t, p).unwrap())
        .collect();
    let rep = convergence_study(&*s2, &gamma, FRAC_PI_2, &probes, &[1e-2, 5e-3, 2.5e-3]).unwrap();
    assert!(rep.order.unwrap() >= 0.5, "{rep:?}");
}

#[test]
fn hemisphere_flow_is_short() {
    let s2 = Arc::new(SphereSpace::unit(2));
    let gamma = meridian(&s2);
    let delta = 5e-3;
    let m = FlowMap::new(s2.clone(), gamma, FRAC_PI_2, delta, FRAC_PI_2).unwrap();
    let sampler = CapSampler::new(s2.clone(), s2.pole(), FRAC_PI_2).unwrap();
    let pairs =
        sample_pairs(&sampler, PairMode::Mixed { scale: 0.05 }, 200, &mut sampling::rng(1)).unwrap();
    let rep = estimate_lipschitz(&m, &pairs, &LipschitzOptions::default()).unwrap();
    assert_eq!(rep.failures, 0);
    assert!(rep.max_ratio <= 1.0 + 5.0 * delta, "{}", rep.max_ratio);
}

#[test]
fn lipschitz_of_simple_maps() {
    let r3 = Arc::new(EuclideanSpace::new(3));
    let sampler = crate::sampling::BallSampler::new(r3.clone(), &[0.0; 3], 1.0).unwrap();
    let pairs =
        sample_pairs(&sampler, PairMode::Independent, 100, &mut sampling::rng(2)).unwrap();
    let id = FnMap::identity(r3.clone());
    let rep = estimate_lipschitz(&id, &pairs, &LipschitzOptions::default()).unwrap();
    assert!(rep.records.iter().all(|r| r.ratio == 1.0));
    let rr = r3.clone();
    let half = FnMap::new(r3.clone(), r3.clone(), move |p| {
        let v: Vec<f64> = p.flat_coords().iter().map(|c| c / 2.0).collect();
        rr.point(&v)
    });
    let rep = estimate_lipschitz(&half, &pairs, &LipschitzOptions::default()).unwrap();
    assert!(rep.records.iter().all(|r| (r.ratio - 0.5).abs() < 1e-12));
    assert!(rep.to_csv().starts_with("pair,d_before,d_after,ratio,displacement\n0,"));
}

#[test]
fn projection_beyond_the_hemisphere_contracts() {
    let s2 = Arc::new(SphereSpace::new(2, 1.2).unwrap());
    let w = s2.pole();
    let r = FRAC_PI_2;
    let ss = s2.clone();
    let wc = w.clone();
    let proj = FnMap::new(s2.clone(), s2.clone(), move |p| ss.project_to_ball(&wc, r, p));
    let sampler = CapSampler::new(s2.clone(), w, r + 0.5).unwrap();
    let pairs =
        sample_pairs(&sampler, PairMode::Local { scale: 1e-3 }, 2000, &mut sampling::rng(3)).unwrap();
    let rep = estimate_lipschitz(&proj, &pairs, &LipschitzOptions::default()).unwrap();
    assert!(rep.max_ratio <= 1.0 + 1e-9);
    let (lo, _) = rep.epsilon_ci.unwrap();
    assert!(rep.epsilon_hat.unwrap() > 0.0 && lo > 0.0, "{rep:?}");
}
