use approx::assert_abs_diff_eq;
use everkin::kinematics::{
    cartesian_to_polar, forward_model, in_workspace, inverse_model, polar_to_cartesian, sector_of,
    KinematicsError,
};
use everkin::scalar::wrap_deg;
use everkin::{CartesianPoint, ModelCoefficient, Motor, MotorAngles, PolarPose, SteeringSector};
use proptest::prelude::*;

fn k() -> ModelCoefficient {
    ModelCoefficient::default()
}

#[test]
fn sector_lookup() {
    assert_eq!(sector_of(0.0), SteeringSector::S1);
    assert_eq!(sector_of(120.0), SteeringSector::S2);
    assert_eq!(sector_of(359.9), SteeringSector::S3);
    assert_eq!(sector_of(360.0), SteeringSector::S1);
    assert_eq!(sector_of(-1.0), SteeringSector::S3);
    assert_eq!(SteeringSector::S1.engaged(), [Motor::M1, Motor::M2]);
    assert_eq!(SteeringSector::S2.engaged(), [Motor::M2, Motor::M3]);
    assert_eq!(SteeringSector::S3.engaged(), [Motor::M3, Motor::M1]);
}

#[test]
fn forward_examples() {
    let s = forward_model(&MotorAngles::new(100.0, 0.0, 0.0), k()).unwrap();
    assert_abs_diff_eq!(s.alpha, 10.4, epsilon = 1e-12);
    assert_abs_diff_eq!(s.theta, 0.0, epsilon = 1e-12);

    let s = forward_model(&MotorAngles::new(50.0, 50.0, 0.0), k()).unwrap();
    assert_abs_diff_eq!(s.alpha, 5.2, epsilon = 1e-12);
    assert_abs_diff_eq!(s.theta, 60.0, epsilon = 1e-12);

    let s = forward_model(&MotorAngles::new(0.0, 0.0, 80.0), k()).unwrap();
    assert_abs_diff_eq!(s.alpha, 8.32, epsilon = 1e-12);
    assert_abs_diff_eq!(s.theta, 240.0, epsilon = 1e-12);

    let s = forward_model(&MotorAngles::zero(), k()).unwrap();
    assert_eq!(s.alpha, 0.0);
    assert!(!s.theta_defined);
}

#[test]
fn forward_rejects_bad_sets() {
    assert!(matches!(
        forward_model(&MotorAngles::new(1.0, 1.0, 1.0), k()),
        Err(KinematicsError::InvalidMotorSet(_))
    ));
    assert!(matches!(
        forward_model(&MotorAngles::new(-1.0, 0.0, 0.0), k()),
        Err(KinematicsError::InvalidMotorSet(_))
    ));
}

#[test]
fn inverse_examples() {
    assert_eq!(inverse_model(0.0, 123.0, k()).unwrap(), MotorAngles::zero());
    let m = inverse_model(5.2, 60.0, k()).unwrap();
    assert_abs_diff_eq!(m.phi[0], 50.0, epsilon = 1e-9);
    assert_abs_diff_eq!(m.phi[1], 50.0, epsilon = 1e-9);
    assert_eq!(m.phi[2], 0.0);

    let m = inverse_model(10.4, 30.0, k()).unwrap();
    let s_closed = 10.4 / (0.104 * (1.0_f64 - 0.75 + 0.1875).sqrt());
    assert_abs_diff_eq!(m.phi[0], 0.75 * s_closed, epsilon = 1e-9);
    assert_abs_diff_eq!(m.phi[1], 0.25 * s_closed, epsilon = 1e-9);
    let back = forward_model(&m, k()).unwrap();
    assert_abs_diff_eq!(back.alpha, 10.4, epsilon = 1e-9);
    assert_abs_diff_eq!(back.theta, 30.0, epsilon = 1e-9);

    assert!(matches!(
        inverse_model(-0.1, 0.0, k()),
        Err(KinematicsError::OutOfRange { .. })
    ));
    assert!(matches!(
        inverse_model(90.1, 0.0, k()),
        Err(KinematicsError::OutOfRange { .. })
    ));
}

#[test]
fn cartesian_examples() {
    let p = polar_to_cartesian(&PolarPose::new(1.2, 0.0, 0.0));
    assert_abs_diff_eq!(p.x, 1.2, epsilon = 1e-12);
    assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-12);

    let p = polar_to_cartesian(&PolarPose::new(1.0, 90.0, 90.0));
    assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.z, 1.0, epsilon = 1e-12);

    let p = polar_to_cartesian(&PolarPose::new(1.12, 30.0, 45.0));
    assert_abs_diff_eq!(p.x, 0.96995, epsilon = 1e-5);
    assert_abs_diff_eq!(p.y, 0.39598, epsilon = 1e-5);
    assert_abs_diff_eq!(p.z, 0.39598, epsilon = 1e-5);

    let q = cartesian_to_polar(&CartesianPoint::new(1.2, 0.0, 0.0)).unwrap();
    assert_eq!((q.r, q.alpha, q.theta), (1.2, 0.0, 0.0));

    let q = cartesian_to_polar(&CartesianPoint::new(0.96995, 0.39598, 0.39598)).unwrap();
    assert_abs_diff_eq!(q.r, 1.12, epsilon = 1e-3);
    assert_abs_diff_eq!(q.alpha, 30.0, epsilon = 1e-3);
    assert_abs_diff_eq!(q.theta, 45.0, epsilon = 1e-3);

    assert_eq!(
        cartesian_to_polar(&CartesianPoint::new(0.0, 0.0, 0.0)),
        Err(KinematicsError::DegenerateInput)
    );
}

#[test]
fn workspace_examples() {
    assert!(in_workspace(&PolarPose::new(1.2, 60.0, 200.0)));
    assert!(!in_workspace(&PolarPose::new(0.25, 10.0, 0.0)));
    assert!(!in_workspace(&PolarPose::new(1.0, 61.0, 0.0)));
}

#[test]
fn boundary_limits_agree() {
    // S1 with the lower motor slack and S2 with the upper motor slack both
    // describe a pure pull on the shared motor.
    for (a, b, theta) in [
        (
            MotorAngles::new(0.0, 70.0, 0.0),
            MotorAngles::new(0.0, 70.0, 1e-300),
            120.0,
        ),
        (
            MotorAngles::new(0.0, 0.0, 70.0),
            MotorAngles::new(1e-300, 0.0, 70.0),
            240.0,
        ),
    ] {
        let sa = forward_model(&a, k()).unwrap();
        let sb = forward_model(&b, k()).unwrap();
        assert_abs_diff_eq!(sa.alpha, 70.0 * 0.104, epsilon = 1e-9);
        assert_abs_diff_eq!(sa.alpha, sb.alpha, epsilon = 1e-9);
        assert_abs_diff_eq!(sa.theta, theta, epsilon = 1e-9);
        assert_abs_diff_eq!(wrap_deg(sa.theta - sb.theta), 0.0, epsilon = 1e-9);
    }
}

#[test]
fn generic_over_f32() {
    let k32 = everkin::kinematics::ModelCoefficient::<f32>::default();
    let m = inverse_model(10.4_f32, 200.0, k32).unwrap();
    let s = forward_model(&m, k32).unwrap();
    assert!((s.alpha - 10.4).abs() < 1e-4);
    assert!((s.theta - 200.0).abs() < 1e-3);
}

proptest! {
    #[test]
    fn inverse_round_trips(alpha in 1e-6f64..=90.0, theta in 0.0f64..360.0) {
        let m = inverse_model(alpha, theta, k()).unwrap();
        let s = forward_model(&m, k()).unwrap();
        prop_assert!((s.alpha - alpha).abs() <= 1e-9);
        prop_assert!(wrap_deg(s.theta - theta).abs() <= 1e-9);
    }

    #[test]
    fn idle_motor_is_slack(alpha in 1e-3f64..=90.0, theta in -720.0f64..720.0) {
        let m = inverse_model(alpha, theta, k()).unwrap();
        let sector = sector_of(theta);
        prop_assert_eq!(m.get(sector.idle()), 0.0);
        prop_assert!(m.is_valid());
        prop_assert!(m.phi.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn continuity_across_boundaries(alpha in 0.5f64..=90.0, which in 0usize..3) {
        let edge = 120.0 * which as f64;
        let below = forward_model(&inverse_model(alpha, edge - 1e-6, k()).unwrap(), k()).unwrap();
        let above = forward_model(&inverse_model(alpha, edge + 1e-6, k()).unwrap(), k()).unwrap();
        prop_assert!((below.alpha - above.alpha).abs() <= 1e-6);
        // The two probes sit 2e-6 apart by construction.
        prop_assert!((wrap_deg(above.theta - below.theta) - 2e-6).abs() <= 1e-6);
    }

    #[test]
    fn forward_scales_linearly(a in 0.0f64..500.0, b in 0.0f64..500.0, pair in 0usize..3, c in 0.01f64..10.0) {
        prop_assume!(a + b > 1e-6);
        let mut m = MotorAngles::zero();
        let [lo, hi] = SteeringSector::ALL[pair].engaged();
        m.set(lo, a);
        m.set(hi, b);
        let mut scaled = MotorAngles::zero();
        scaled.set(lo, c * a);
        scaled.set(hi, c * b);
        let s = forward_model(&m, k()).unwrap();
        let t = forward_model(&scaled, k()).unwrap();
        prop_assert!((t.alpha - c * s.alpha).abs() <= 1e-9 * (1.0 + t.alpha));
        prop_assert!(wrap_deg(t.theta - s.theta).abs() <= 1e-9);
    }

    #[test]
    fn cartesian_round_trip(r in 1e-3f64..10.0, alpha in 1e-3f64..=90.0, theta in 0.0f64..360.0) {
        let pose = PolarPose::new(r, alpha, theta);
        let back = cartesian_to_polar(&polar_to_cartesian(&pose)).unwrap();
        prop_assert!((back.r - r).abs() <= 1e-9);
        prop_assert!((back.alpha - alpha).abs() <= 1e-9);
        prop_assert!(wrap_deg(back.theta - theta).abs() <= 1e-9);
    }

    #[test]
    fn workspace_matches_cartesian_check(r in 0.0f64..1.5, alpha in 0.0f64..=90.0, theta in 0.0f64..360.0) {
        let pose = PolarPose::new(r, alpha, theta);
        let p = polar_to_cartesian(&pose);
        let dist = p.norm();
        let half_angle = 60.0_f64.to_radians().cos();
        let brute = (0.3..=1.2).contains(&dist) && p.x >= dist * half_angle - 1e-12;
        // Skip samples within rounding distance of a boundary.
        prop_assume!((dist - 0.3).abs() > 1e-9 && (dist - 1.2).abs() > 1e-9 && (alpha - 60.0).abs() > 1e-9);
        prop_assert_eq!(in_workspace(&pose), brute);
    }
}
