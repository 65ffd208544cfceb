use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::*;
use crate::spaces::SphereSpace;

fn hemisphere_setup(mesh: f64) -> (Arc<SphereSpace>, Theorem1Space, Arc<ArcInterface>) {
    let s = Arc::new(SphereSpace::unit(2));
    let p = s.pole();
    let e = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let arc = Arc::new(ArcInterface::new(s.clone(), p.clone(), e).unwrap());
    let th = build_theorem1_space(s.clone(), arc.clone(), p, mesh).unwrap();
    (s, th, arc)
}

#[test]
fn quarter_meridian_gate_bookkeeping() {
    let mesh = PI / 200.0;
    let (_, th, _) = hemisphere_setup(mesh);
    assert_eq!(th.glued.gates().len(), 101);
    assert!(th.glued.gate_isometry_defect().unwrap() < 1e-9);
    assert!(!th.replaced);
    let g0 = th.driving_point(0.0).unwrap();
    let tip = th.driving_point(FRAC_PI_2).unwrap();
    let w = &th.glued;
    assert!((w.distance(&g0, &tip).unwrap() - FRAC_PI_2).abs() < 1e-12);
    let a = th.driving_point(0.3).unwrap();
    let b = th.driving_point(1.1).unwrap();
    assert!((w.distance(&a, &b).unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn gate_points_agree_across_pieces() {
    let (_, th, _) = hemisphere_setup(PI / 200.0);
    let w = &th.glued;
    let gates = w.gates();
    let x = w.in_u(gates[10].in_u.clone()).unwrap();
    let y = w.in_j(gates[70].in_j.clone()).unwrap();
    let d = w.measured_distance(&x, &y).unwrap();
    let dk = 60.0 * (FRAC_PI_2 / 100.0);
    assert!((d.value - dk).abs() < 1e-9, "{} vs {dk}", d.value);
    assert!(d.error_bound > 0.0);
}

#[test]
fn base_point_to_tip_is_quarter_turn() {
    let (s, th, _) = hemisphere_setup(PI / 200.0);
    let w = &th.glued;
    let p = w.in_u(s.pole()).unwrap();
    assert!((w.distance(&p, &w.tip().unwrap()).unwrap() - FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn cross_distance_matches_brute_force_leg_formula() {
    let (s, th, arc) = hemisphere_setup(PI / 200.0);
    let w = &th.glued;
    for (theta, phi, t) in [(0.9, 1.2, 0.4), (1.4, -2.0, 1.0), (0.2, 2.9, 0.05), (1.57, 0.1, 1.5)] {
        let x = s.from_angles(theta, phi).unwrap();
        let gamma = th.driving_point(t).unwrap();
        let d = w.distance(&w.in_u(x.clone()).unwrap(), &gamma).unwrap();
        let n = 20_000;
        let brute = (0..=n)
            .map(|i| {
                let a = FRAC_PI_2 * i as f64 / n as f64;
                let k = arc.embed(&arc.at(a)).unwrap();
                s.distance(&x, &k).unwrap() + (t.cos() * a.cos()).acos()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(d <= brute + 1e-12 && brute - d < 1e-7, "{d} vs {brute}");
    }
}

#[test]
fn refinement_beats_gate_quantisation() {
    let (s, th, arc) = hemisphere_setup(PI / 20.0);
    let coarse = GluedSpace::new(s.clone(), arc, PI / 20.0).unwrap().with_refinement(false);
    let x = s.from_angles(1.0, 0.77).unwrap();
    let y = th.driving_point(0.5).unwrap();
    let fine = th.glued.distance(&th.glued.in_u(x.clone()).unwrap(), &y).unwrap();
    let rough = coarse
        .distance(&coarse.in_u(x).unwrap(), &coarse.cone_point(th.base_k.clone(), FRAC_PI_2 - 0.5).unwrap())
        .unwrap();
    assert!(fine <= rough + 1e-12);
    assert!(rough - fine <= coarse.gate_error_bound());
}

#[test]
fn slice_points_stay_under_tip_projection() {
    let (_, th, _) = hemisphere_setup(PI / 200.0);
    let w = &th.glued;
    let tip = w.tip().unwrap();
    for g in w.gates().iter().step_by(7) {
        let x = w.in_u(g.in_u.clone()).unwrap();
        let pr = w.ball_projector(&tip, FRAC_PI_2).unwrap().project(&x).unwrap();
        let d = w.distance(&pr.point, &x).unwrap();
        assert!(d < 1e-9, "moved by {d}");
    }
}

#[test]
fn projection_lands_on_sphere_of_radius_r() {
    let (s, th, _) = hemisphere_setup(PI / 200.0);
    let w = &th.glued;
    let c = th.driving_point(0.9).unwrap();
    let proj = w.ball_projector(&c, FRAC_PI_2).unwrap();
    for (theta, phi) in [(1.5, 2.0), (1.2, -1.0), (1.55, 3.0)] {
        let x = w.in_u(s.from_angles(theta, phi).unwrap()).unwrap();
        let before = w.distance(&x, &c).unwrap();
        let pr = proj.project(&x).unwrap();
        assert!(pr.moved && before > FRAC_PI_2);
        let after = w.distance(&pr.point, &c).unwrap();
        assert!((after - FRAC_PI_2).abs() < 2.0 * w.gate_error_bound());
        assert!((after - FRAC_PI_2).abs() < 1e-8);
        let moved = w.distance(&pr.point, &x).unwrap();
        assert!((moved - (before - FRAC_PI_2)).abs() < 1e-8);
        assert_eq!(w.unwrap(&pr.point).unwrap().0, Piece::U);
    }
}

#[test]
fn decreasing_balls_on_probes() {
    let (s, th, _) = hemisphere_setup(PI / 200.0);
    let w = &th.glued;
    let ts: Vec<f64> = (0..=8).map(|i| FRAC_PI_2 * i as f64 / 8.0).collect();
    for i in 0..40 {
        let x = w.in_u(s.from_angles(FRAC_PI_2 * i as f64 / 39.0, 0.61 * i as f64).unwrap()).unwrap();
        let ds: Vec<f64> = ts
            .iter()
            .map(|&t| w.distance(&x, &th.driving_point(t).unwrap()).unwrap())
            .collect();
        for a in 0..ds.len() {
            for b in a + 1..ds.len() {
                if ds[b] <= FRAC_PI_2 {
                    assert!(ds[a] <= FRAC_PI_2 + 2.0 * w.mesh());
                }
            }
        }
    }
}

#[test]
fn glued_builder_preconditions() {
    let s = Arc::new(SphereSpace::unit(2));
    let p = s.pole();
    let e = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let arc = Arc::new(ArcInterface::new(s.clone(), p.clone(), e.clone()).unwrap());
    let far = s.from_angles(2.0, PI).unwrap();
    let err = build_theorem1_space(s.clone(), arc.clone(), far, 0.1).unwrap_err();
    assert!(err.is_precondition());
    assert!(err.to_string().contains("gate"));
    let off = s.from_angles(0.3, FRAC_PI_2).unwrap();
    let arc2 = Arc::new(ArcInterface::new(s.clone(), s.from_angles(0.2, 0.0).unwrap(), e).unwrap());
    assert!(build_theorem1_space(s.clone(), arc2, off, 0.1).unwrap_err().is_precondition());

    let big = Arc::new(SphereSpace::new(2, 1.2).unwrap());
    let start = big.from_angles(0.2, 0.0).unwrap();
    let end = big.from_angles(1.0, 0.0).unwrap();
    let arc3 = Arc::new(ArcInterface::new(big.clone(), start, end).unwrap());
    let th = build_theorem1_space(big.clone(), arc3, big.pole(), 0.05).unwrap();
    assert!(th.replaced);
    assert!((big.distance(&th.base, &big.pole()).unwrap() - 0.24).abs() < 1e-8);
}

#[test]
fn singleton_interface_cone_is_an_arc() {
    let s = Arc::new(SphereSpace::unit(2));
    let p = s.pole();
    let k = Arc::new(ArcInterface::singleton(s.clone(), p.clone()).unwrap());
    let th = build_theorem1_space(s.clone(), k, p, 0.1).unwrap();
    let w = &th.glued;
    assert_eq!(w.gates().len(), 1);
    let x = w.in_u(s.from_angles(1.0, 0.5).unwrap()).unwrap();
    let tip = w.tip().unwrap();
    assert!((w.distance(&x, &tip).unwrap() - (1.0 + FRAC_PI_2)).abs() < 1e-12);
}

#[test]
fn net_distances_bound_glued_distances() {
    let (s, th, _) = hemisphere_setup(PI / 40.0);
    let w = &th.glued;
    let mut samples = Vec::new();
    for i in 0..12 {
        for j in 0..24 {
            let theta = FRAC_PI_2 * (i as f64 + 0.5) / 12.0;
            samples.push(s.from_angles(theta, 2.0 * PI * j as f64 / 24.0).unwrap());
        }
    }
    let net = EpsilonNet::build(w, &samples, 10, 0.35).unwrap();
    for (theta, phi, t) in [(0.8, 2.0, 0.3), (1.3, -0.5, 1.2)] {
        let x = w.in_u(s.from_angles(theta, phi).unwrap()).unwrap();
        let y = th.driving_point(t).unwrap();
        let exact = w.distance(&x, &y).unwrap();
        let approx = net.distance(w, &x, &y).unwrap();
        assert!(exact <= approx.value + 1e-9);
        assert!(approx.value - exact < 0.05, "{} vs {exact}", approx.value);
    }
}

#[test]
fn relaxation_agrees_with_single_crossing() {
    let (s, th, arc) = hemisphere_setup(PI / 60.0);
    let relaxed = GluedSpace::new(s.clone(), arc, PI / 60.0)
        .unwrap()
        .with_crossing(CrossingPolicy {
            max_crossings: 2,
            relaxation: true,
        })
        .unwrap();
    let y = th.driving_point(0.7).unwrap();
    let x = s.from_angles(1.2, 1.9).unwrap();
    let single = th.glued.distance(&th.glued.in_u(x.clone()).unwrap(), &y).unwrap();
    let multi = relaxed
        .distance(&relaxed.in_u(x).unwrap(), &relaxed.cone_point(th.base_k.clone(), FRAC_PI_2 - 0.7).unwrap())
        .unwrap();
    assert!((single - multi).abs() <= 10.0 * relaxed.mesh());
}
