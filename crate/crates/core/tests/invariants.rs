use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use proptest::prelude::*;
use tractrix_core::spaces::{EuclideanSpace, SphereSpace, SphericalJoinSpace};
use tractrix_core::tractrix::{tractrix_flow, DrivingCurve, Partition};
use tractrix_core::{Point, Space};

fn s2() -> Arc<SphereSpace> {
    Arc::new(SphereSpace::unit(2))
}

fn angles() -> impl Strategy<Value = (f64, f64)> {
    (0.0..PI, -PI..PI)
}

fn sphere_point(s: &SphereSpace, (theta, phi): (f64, f64)) -> Point {
    s.from_angles(theta, phi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sphere_triangle_inequality(a in angles(), b in angles(), c in angles()) {
        let s = s2();
        let (x, y, z) = (sphere_point(&s, a), sphere_point(&s, b), sphere_point(&s, c));
        let xy = s.distance(&x, &y).unwrap();
        let yz = s.distance(&y, &z).unwrap();
        let xz = s.distance(&x, &z).unwrap();
        prop_assert!(xz <= xy + yz + 1e-12);
        prop_assert!((xy - s.distance(&y, &x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn sphere_geodesics_have_constant_speed(a in angles(), b in angles(), t in 0.0..=1.0f64) {
        let s = s2();
        let (x, y) = (sphere_point(&s, a), sphere_point(&s, b));
        let d = s.distance(&x, &y).unwrap();
        prop_assume!(d < PI - 1e-3);
        let g = s.geodesic_point(&x, &y, t).unwrap();
        prop_assert!((s.distance(&x, &g).unwrap() - t * d).abs() < 1e-10);
        prop_assert!((s.distance(&g, &y).unwrap() - (1.0 - t) * d).abs() < 1e-10);
    }

    #[test]
    fn sphere_exp_inverts_log(a in angles(), b in angles()) {
        let s = s2();
        let (x, y) = (sphere_point(&s, a), sphere_point(&s, b));
        prop_assume!(s.distance(&x, &y).unwrap() < PI - 1e-3);
        let v = s.log_map(&x, &y).unwrap();
        let back = s.exp_map(&x, &v).unwrap();
        prop_assert!(s.distance(&back, &y).unwrap() < 1e-10);
    }

    #[test]
    fn euclidean_exp_inverts_log(x in prop::array::uniform3(-5.0..5.0f64), y in prop::array::uniform3(-5.0..5.0f64)) {
        let e = EuclideanSpace::new(3);
        let (p, q) = (e.point(&x).unwrap(), e.point(&y).unwrap());
        let back = e.exp_map(&p, &e.log_map(&p, &q).unwrap()).unwrap();
        prop_assert!(e.distance(&back, &q).unwrap() < 1e-12);
    }

    #[test]
    fn ball_projection_is_idempotent(c in angles(), x in angles(), r in 0.05..FRAC_PI_2) {
        let s = s2();
        let (c, x) = (sphere_point(&s, c), sphere_point(&s, x));
        prop_assume!(s.distance(&c, &x).unwrap() < PI - 1e-3);
        let p = s.project_to_ball(&c, r, &x).unwrap();
        prop_assert!(s.distance(&c, &p).unwrap() <= r + 1e-12);
        let again = s.project_to_ball(&c, r, &p).unwrap();
        prop_assert!(s.distance(&p, &again).unwrap() < 1e-12);
    }

    #[test]
    fn ball_projection_onto_small_balls_is_short(c in angles(), x in angles(), y in angles(), r in 0.05..FRAC_PI_2) {
        let s = s2();
        let (c, x, y) = (sphere_point(&s, c), sphere_point(&s, x), sphere_point(&s, y));
        prop_assume!(s.distance(&c, &x).unwrap() <= FRAC_PI_2 && s.distance(&c, &y).unwrap() <= FRAC_PI_2);
        let px = s.project_to_ball(&c, r, &x).unwrap();
        let py = s.project_to_ball(&c, r, &y).unwrap();
        prop_assert!(s.distance(&px, &py).unwrap() <= s.distance(&x, &y).unwrap() + 1e-12);
    }

    #[test]
    fn join_matches_its_sphere(a in angles(), b in angles(), c in angles(), d in angles(), t1 in 0.0..=FRAC_PI_2, t2 in 0.0..=FRAC_PI_2) {
        let s = s2();
        let j = SphericalJoinSpace::of_spheres(s.clone(), s.clone()).unwrap();
        let big = SphereSpace::unit(5);
        let x = j.point(sphere_point(&s, a), sphere_point(&s, b), t1).unwrap();
        let y = j.point(sphere_point(&s, c), sphere_point(&s, d), t2).unwrap();
        let zx = big.point_normalized(&j.to_sphere_coords(&x).unwrap()).unwrap();
        let zy = big.point_normalized(&j.to_sphere_coords(&y).unwrap()).unwrap();
        prop_assert!((j.distance(&x, &y).unwrap() - big.distance(&zx, &zy).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn tractrix_flow_keeps_the_ball_and_speed(a in angles(), frac in 0.0..=1.0f64) {
        let s = s2();
        let start = s.pole();
        let end = s.from_angles(1.0, 0.3).unwrap();
        let gamma = DrivingCurve::geodesic(s.clone(), start.clone(), end, 0.0, 1.0).unwrap();
        let r = 0.8;
        // Start inside the initial ball.
        let dir = sphere_point(&s, a);
        prop_assume!(s.distance(&start, &dir).unwrap() < PI - 1e-3);
        let p = s.geodesic_point(&start, &dir, frac * r / s.distance(&start, &dir).unwrap().max(r)).unwrap();
        let traj = tractrix_flow(&*s, &gamma, r, 1e-2, &p).unwrap();
        let l = gamma.lipschitz();
        for (i, (t, q)) in traj.times.iter().zip(&traj.points).enumerate() {
            prop_assert!(s.distance(&gamma.at(*t).unwrap(), q).unwrap() <= r + 1e-9);
            if i > 0 {
                let step = traj.times[i] - traj.times[i - 1];
                prop_assert!(s.distance(&traj.points[i - 1], q).unwrap() <= l * step + 1e-9);
            }
        }
    }
}

#[test]
fn refined_partitions_nest() {
    let p = Partition::with_step(0.0, 5.0, 1e-2).unwrap();
    let q = p.refined();
    for i in 0..=p.steps() {
        assert_eq!(p.time(i), q.time(2 * i));
    }
}
