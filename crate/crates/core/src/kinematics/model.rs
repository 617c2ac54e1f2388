use super::{
    check_pitch, sector_of, KinematicsError, ModelCoefficient, MotorAngles, SteeringSector,
};
use crate::scalar::{normalize_deg, Scalar};

/// Pitch and rotation of the arm tip direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SteeringAngles<T> {
    pub alpha: T,
    pub theta: T,
    /// False for a straight arm, where rotation has no meaning and `theta`
    /// is reported as 0.
    pub theta_defined: bool,
}

impl<T: Scalar> SteeringAngles<T> {
    pub fn new(alpha: T, theta: T) -> Self {
        SteeringAngles {
            alpha,
            theta: normalize_deg(theta),
            theta_defined: true,
        }
    }

    pub fn straight() -> Self {
        SteeringAngles {
            alpha: T::zero(),
            theta: T::zero(),
            theta_defined: false,
        }
    }
}

/// Sector and (lower-edge, upper-edge) pulls for a motor set with at most
/// two active motors. `None` when all three are slack.
fn active_pair<T: Scalar>(phis: &MotorAngles<T>) -> Option<(SteeringSector, T, T)> {
    let [p1, p2, p3] = phis.phi;
    let z = T::zero();
    let sector = match (p1 != z, p2 != z, p3 != z) {
        (false, false, false) => return None,
        (true, _, false) => SteeringSector::S1,
        (false, true, _) => SteeringSector::S2,
        (_, false, true) => SteeringSector::S3,
        (true, true, true) => unreachable!("validated before"),
    };
    let [lo, hi] = sector.engaged();
    Some((sector, phis.get(lo), phis.get(hi)))
}

/// Motor angles to (pitch, rotation).
///
/// Within the sector spanned by the active pair `(a, b)` starting at
/// bearing `s`: `alpha = k * sqrt(a^2 - a*b + b^2)` and
/// `theta = s + 120 * b / (a + b)`.
pub fn forward_model<T: Scalar>(
    phis: &MotorAngles<T>,
    k: ModelCoefficient<T>,
) -> Result<SteeringAngles<T>, KinematicsError> {
    if !phis.is_valid() {
        return Err(KinematicsError::InvalidMotorSet(phis.to_f64()));
    }
    let Some((sector, a, b)) = active_pair(phis) else {
        return Ok(SteeringAngles::straight());
    };
    let alpha = k.value() * (a * a - a * b + b * b).sqrt();
    let theta = T::lit(sector.start_deg()) + T::lit(120.0) * b / (a + b);
    Ok(SteeringAngles::new(alpha, theta))
}

/// (pitch, rotation) to the feedforward motor angles: the sector's idle
/// motor is slack and the engaged pair reproduces the pose exactly under
/// [`forward_model`].
pub fn inverse_model<T: Scalar>(
    alpha: T,
    theta: T,
    k: ModelCoefficient<T>,
) -> Result<MotorAngles<T>, KinematicsError> {
    check_pitch(alpha)?;
    if !theta.is_finite() {
        return Err(KinematicsError::OutOfRange {
            what: "theta",
            value: theta.as_f64(),
            min: f64::NEG_INFINITY,
            max: f64::INFINITY,
        });
    }
    let mut out = MotorAngles::zero();
    if alpha == T::zero() {
        return Ok(out);
    }
    let theta = normalize_deg(theta);
    let sector = sector_of(theta);
    let t = (theta - T::lit(sector.start_deg())) / T::lit(120.0);
    let three = T::lit(3.0);
    // a^2 - ab + b^2 with a = (1-t)s, b = ts
    let shape = (T::one() - three * t + three * t * t).sqrt();
    let s = alpha / (k.value() * shape);
    let [lo, hi] = sector.engaged();
    out.set(lo, (T::one() - t) * s);
    out.set(hi, t * s);
    Ok(out)
}
