use super::{CartesianPoint, KinematicsError, PolarPose};
use crate::scalar::{normalize_deg, Scalar};

/// `x = R cos(alpha)`, `y = R sin(alpha) cos(theta)`, `z = R sin(alpha) sin(theta)`.
///
/// `theta = 0` lies along `+y`, the horizontal pull direction of motor 1.
pub fn polar_to_cartesian<T: Scalar>(pose: &PolarPose<T>) -> CartesianPoint<T> {
    let a = pose.alpha.to_radians();
    let t = pose.theta.to_radians();
    let lateral = pose.r * a.sin();
    CartesianPoint::new(pose.r * a.cos(), lateral * t.cos(), lateral * t.sin())
}

/// Inverse of [`polar_to_cartesian`]. Points behind the collar plane give
/// `alpha > 90`; a point on the `+x` axis reports `theta = 0`.
pub fn cartesian_to_polar<T: Scalar>(
    p: &CartesianPoint<T>,
) -> Result<PolarPose<T>, KinematicsError> {
    let r = p.norm();
    if r.is_nan() || r <= T::zero() || !p.is_finite() {
        return Err(KinematicsError::DegenerateInput);
    }
    let lateral = p.y.hypot(p.z);
    let alpha = lateral.atan2(p.x).to_degrees();
    let theta = if lateral == T::zero() {
        T::zero()
    } else {
        normalize_deg(p.z.atan2(p.y).to_degrees())
    };
    Ok(PolarPose { r, alpha, theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn straight_arm_on_x() {
        let p = polar_to_cartesian(&PolarPose::new(1.2, 0.0, 0.0_f64));
        assert_eq!((p.x, p.y, p.z), (1.2, 0.0, 0.0));
        let back = cartesian_to_polar(&p).unwrap();
        assert_eq!((back.r, back.alpha, back.theta), (1.2, 0.0, 0.0));
    }

    #[test]
    fn full_pitch_up() {
        let p = polar_to_cartesian(&PolarPose::new(1.0, 90.0, 90.0_f64));
        assert!(p.x.abs() < 1e-15 && p.y.abs() < 1e-15);
        assert_relative_eq!(p.z, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn oblique_pose() {
        let p = polar_to_cartesian(&PolarPose::new(1.12, 30.0, 45.0_f64));
        assert_relative_eq!(p.x, 0.969_948_452, epsilon = 1e-8);
        assert_relative_eq!(p.y, 0.395_979_797, epsilon = 1e-8);
        assert_relative_eq!(p.z, 0.395_979_797, epsilon = 1e-8);

        let q = cartesian_to_polar(&CartesianPoint::new(0.96995, 0.39598, 0.39598_f64)).unwrap();
        assert!((q.r - 1.12).abs() < 1e-3);
        assert!((q.alpha - 30.0).abs() < 1e-3);
        assert!((q.theta - 45.0).abs() < 1e-3);
    }

    #[test]
    fn origin_is_degenerate() {
        assert_eq!(
            cartesian_to_polar(&CartesianPoint::new(0.0, 0.0, 0.0_f64)),
            Err(KinematicsError::DegenerateInput)
        );
    }

    #[test]
    fn below_horizontal_wraps() {
        let q = cartesian_to_polar(&CartesianPoint::new(1.0, 0.5, -0.5_f64)).unwrap();
        assert_relative_eq!(q.theta, 315.0, epsilon = 1e-12);
    }
}
