use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::Arc;

use super::*;
use crate::glued::{ArcInterface, Interface};
use crate::metric::Space;
use crate::sampling::{self, sample_pairs, CapSampler, PairMode, PointSampler};
use crate::spaces::SphereSpace;
use crate::tractrix::{estimate_lipschitz, FnMap, LipschitzOptions};

fn s2() -> Arc<SphereSpace> {
    Arc::new(SphereSpace::unit(2))
}

#[test]
fn radial_folds_the_annulus() {
    let s = s2();
    let p = s.pole();
    let x = s.from_angles(2.0 * PI / 3.0, 0.4).unwrap();
    let y = radial_retraction(&*s, &p, &x).unwrap();
    assert!((s.distance(&p, &y).unwrap() - PI / 3.0).abs() < 1e-12);
    assert!((s.distance(&x, &y).unwrap() - PI / 3.0).abs() < 1e-12);

    let inside = s.from_angles(1.2, -2.0).unwrap();
    assert_eq!(radial_retraction(&*s, &p, &inside).unwrap(), inside);

    let south = s.point(&[0.0, 0.0, -1.0]).unwrap();
    assert!(s.distance(&radial_retraction(&*s, &p, &south).unwrap(), &p).unwrap() < 1e-15);
}

#[test]
fn radial_needs_curvature_at_most_one() {
    let s = Arc::new(SphereSpace::new(2, 0.5).unwrap());
    let p = s.pole();
    let err = radial_retraction(&*s, &p, &p).unwrap_err();
    assert!(err.is_precondition());
}

#[test]
fn phi_onto_a_point_is_constant() {
    let s = s2();
    let u: Arc<dyn Space> = s.clone();
    let iface = Arc::new(ArcInterface::singleton(u.clone(), s.pole()).unwrap());
    let phi = PhiPipeline::new(u, iface, s.pole(), PI / 50.0, 1e-2).unwrap();
    for (theta, lon) in [(0.3, 0.0), (1.0, 2.0), (FRAC_PI_2, -1.0)] {
        let x = s.from_angles(theta, lon).unwrap();
        let out = phi.evaluate(&x).unwrap();
        assert!(s.distance(&out.point, &s.pole()).unwrap() < 1e-12);
    }
}

#[test]
fn phi_fixes_the_interface() {
    let s = s2();
    let u: Arc<dyn Space> = s.clone();
    let end = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let iface = Arc::new(ArcInterface::new(u.clone(), s.pole(), end).unwrap());
    let phi = PhiPipeline::new(u, iface.clone(), s.pole(), PI / 50.0, 1e-2).unwrap();
    let ks: Vec<_> = (0..=8)
        .map(|i| iface.embed(&iface.at(FRAC_PI_2 * i as f64 / 8.0)).unwrap())
        .collect();
    let err = phi.retraction_error(&ks).unwrap();
    assert!(err <= phi.fixed_point_tolerance(), "{err}");
}

#[test]
fn phi_lands_in_the_interface() {
    let s = s2();
    let u: Arc<dyn Space> = s.clone();
    let end = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let iface = Arc::new(ArcInterface::new(u.clone(), s.pole(), end).unwrap());
    let phi = PhiPipeline::new(u, iface, s.pole(), PI / 50.0, 1e-2).unwrap();
    let x = s.from_angles(1.3, 2.5).unwrap();
    let out = phi.evaluate(&x).unwrap();
    let c = out.point.flat_coords();
    assert!(c[1].abs() < 1e-12 && c[0] >= -1e-12 && c[2] >= -1e-12, "{c:?}");
    assert!(out.snap < 1e-9);
}

#[test]
fn psi_fixes_the_diagonal() {
    let s = s2();
    let psi = PsiPipeline::new(s.clone(), s.pole(), FRAC_PI_2, PI / 20.0, 1e-2).unwrap();
    let sampler = CapSampler::new(s.clone(), s.pole(), FRAC_PI_2).unwrap();
    let mut rng = sampling::rng(5);
    let diag: Vec<_> = (0..5)
        .map(|_| {
            let x = sampler.sample(&mut rng).unwrap();
            psi.pair(x.clone(), x).unwrap()
        })
        .collect();
    let (out, _) = psi.evaluate_many(&diag);
    for (x, o) in diag.iter().zip(out) {
        let (y, _) = o.unwrap();
        assert!(psi.product().distance(x, &y).unwrap() < 1e-9);
    }
}

#[test]
fn psi_output_is_diagonal() {
    let s = s2();
    let psi = PsiPipeline::new(s.clone(), s.pole(), FRAC_PI_2, PI / 20.0, 1e-2).unwrap();
    let x = psi
        .pair(s.from_angles(0.4, 0.0).unwrap(), s.from_angles(1.1, 2.0).unwrap())
        .unwrap();
    let y = psi.apply(&x).unwrap();
    let (a, b) = psi.product().parts(&y).unwrap();
    assert!(s.distance(a, b).unwrap() < 1e-12);
}

#[test]
fn cone_retraction_fixes_k() {
    let s = s2();
    let a = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
    let b = [-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
    let r = ConeRetraction::new(s.clone(), ConeSet::sector(&a, &b).unwrap(), &s.pole()).unwrap();
    for theta in [-0.7, 0.0, 0.3, PI / 4.0] {
        let k = s.point(&[theta.sin(), 0.0, theta.cos()]).unwrap();
        assert!(r.in_k(&k, 1e-12).unwrap());
        assert!(s.distance(&r.apply(&k).unwrap(), &k).unwrap() < 1e-12);
    }
    let x = s.from_angles(1.0, 1.0).unwrap();
    assert!(r.in_k(&r.apply(&x).unwrap(), 1e-12).unwrap());
}

#[test]
fn cone_onto_a_point_sends_the_equator_to_p() {
    let s = s2();
    let r = ConeRetraction::new(s.clone(), ConeSet::ray(&[0.0, 0.0, 1.0]).unwrap(), &s.pole()).unwrap();
    let x = s.point(&[0.0, 1.0, 0.0]).unwrap();
    assert!(s.distance(&r.apply(&x).unwrap(), &s.pole()).unwrap() < 1e-15);
}

#[test]
fn cone_rejects_k_outside_the_hemisphere() {
    let s = s2();
    let set = ConeSet::sector(&[0.0, 0.0, 1.0], &[0.0, 0.6, -0.8]).unwrap();
    assert!(ConeRetraction::new(s.clone(), set, &s.pole()).unwrap_err().is_precondition());
}

#[test]
fn sector_retraction_is_short() {
    let s = s2();
    let a = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
    let b = [-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
    let r = ConeRetraction::new(s.clone(), ConeSet::sector(&a, &b).unwrap(), &s.pole()).unwrap();
    let sampler = CapSampler::new(s.clone(), s.pole(), PI).unwrap();
    let pairs = sample_pairs(&sampler, PairMode::Mixed { scale: 1e-3 }, 2000, &mut sampling::rng(2)).unwrap();
    let rep = estimate_lipschitz(&r, &pairs, &LipschitzOptions::default()).unwrap();
    assert_eq!(rep.failures, 0);
    assert!(rep.max_ratio <= 1.0 + 1e-6, "{}", rep.max_ratio);
}

#[test]
fn halfspace_hemisphere_is_identity_there() {
    let s = s2();
    let r = ConeRetraction::new(
        s.clone(),
        ConeSet::halfspaces(&[vec![0.0, 0.0, 1.0]]).unwrap(),
        &s.pole(),
    )
    .unwrap();
    let id = FnMap::identity(s.clone());
    let sampler = CapSampler::new(s.clone(), s.pole(), FRAC_PI_2).unwrap();
    let mut rng = sampling::rng(9);
    let probes: Vec<_> = (0..50).map(|_| sampler.sample(&mut rng).unwrap()).collect();
    let rep = compare_retractions(&r, &id, &probes).unwrap();
    assert_eq!(rep.failures, 0);
    assert!(rep.max_difference < 1e-12);
    assert!(rep.to_csv().starts_with("probe,difference\n0,"));
}

#[test]
fn circular_cone_of_zero_angle_matches_the_ray() {
    let s = s2();
    let axis = [0.0, 0.0, 1.0];
    let ray = ConeRetraction::new(s.clone(), ConeSet::ray(&axis).unwrap(), &s.pole()).unwrap();
    let circ = ConeRetraction::new(s.clone(), ConeSet::circular(&axis, 0.0).unwrap(), &s.pole()).unwrap();
    let sampler = CapSampler::new(s.clone(), s.pole(), FRAC_PI_2).unwrap();
    let mut rng = sampling::rng(4);
    let probes: Vec<_> = (0..50).map(|_| sampler.sample(&mut rng).unwrap()).collect();
    let rep = compare_retractions(&ray, &circ, &probes).unwrap();
    assert!(rep.max_difference < 1e-12);
}
