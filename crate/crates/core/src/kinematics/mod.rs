//! Single-segment steering geometry: the three-sector cable partition, the
//! forward and inverse steering model, and the arm-base Cartesian frame.
//!
//! Angles are degrees throughout. Radians only appear inside trig calls.

mod frame;
mod model;
mod sector;
mod workspace;

pub use frame::{cartesian_to_polar, polar_to_cartesian};
pub use model::{forward_model, inverse_model, SteeringAngles};
pub use sector::{sector_of, Motor, SteeringSector};
pub use workspace::{in_workspace, WorkspaceLimits};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{normalize_deg, Scalar};

/// Pitch angle above which the steering model is not valid.
pub const MAX_MODEL_PITCH_DEG: f64 = 90.0;

/// Measured slope of arm pitch against steering motor rotation.
pub const DEFAULT_K: f64 = 0.104;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error(
        "invalid motor set {0:?}: angles must be finite, non-negative, with at most two nonzero"
    )]
    InvalidMotorSet([f64; 3]),
    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("point at the frame origin has no direction")]
    DegenerateInput,
    #[error("model coefficient must be positive and finite, got {0}")]
    InvalidCoefficient(f64),
}

/// Arm state in the arm's spherical frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarPose<T> {
    /// Arm length, meters.
    pub r: T,
    /// Pitch away from the straight configuration, degrees.
    pub alpha: T,
    /// Rotation of the deflection about the straight axis, degrees in `[0, 360)`.
    pub theta: T,
}

impl<T: Scalar> PolarPose<T> {
    pub fn new(r: T, alpha: T, theta: T) -> Self {
        PolarPose {
            r,
            alpha,
            theta: normalize_deg(theta),
        }
    }

    /// Checks `r >= 0`, `0 <= alpha <= 90` and finiteness.
    pub fn validate(&self) -> Result<(), KinematicsError> {
        if !(self.r.is_finite() && self.r >= T::zero()) {
            return Err(KinematicsError::OutOfRange {
                what: "r",
                value: self.r.as_f64(),
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        check_pitch(self.alpha)?;
        if !self.theta.is_finite() {
            return Err(KinematicsError::OutOfRange {
                what: "theta",
                value: self.theta.as_f64(),
                min: 0.0,
                max: 360.0,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_pitch<T: Scalar>(alpha: T) -> Result<(), KinematicsError> {
    if alpha >= T::zero() && alpha <= T::lit(MAX_MODEL_PITCH_DEG) {
        Ok(())
    } else {
        Err(KinematicsError::OutOfRange {
            what: "alpha",
            value: alpha.as_f64(),
            min: 0.0,
            max: MAX_MODEL_PITCH_DEG,
        })
    }
}

/// Point in the arm-base frame: origin at the steering collar, `+x` along
/// the straight arm, `+z` up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartesianPoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> CartesianPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        CartesianPoint { x, y, z }
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Steering motor shaft rotations from the slack position, degrees.
/// Motors sit at bearings 0°, 120° and 240°.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotorAngles<T> {
    pub phi: [T; 3],
}

impl<T: Scalar> MotorAngles<T> {
    pub fn new(phi1: T, phi2: T, phi3: T) -> Self {
        MotorAngles {
            phi: [phi1, phi2, phi3],
        }
    }

    pub fn zero() -> Self {
        MotorAngles {
            phi: [T::zero(); 3],
        }
    }

    pub fn get(&self, motor: Motor) -> T {
        self.phi[motor.index()]
    }

    pub fn set(&mut self, motor: Motor, value: T) {
        self.phi[motor.index()] = value;
    }

    /// Number of motors carrying a nonzero angle.
    pub fn active_count(&self) -> usize {
        self.phi.iter().filter(|p| **p != T::zero()).count()
    }

    /// Finite, non-negative, and at most two motors pulling.
    pub fn is_valid(&self) -> bool {
        self.phi.iter().all(|p| p.is_finite() && *p >= T::zero()) && self.active_count() <= 2
    }

    /// Subtracts the smallest pull from all three cables. Equal tension on
    /// all three cables cancels, so the deflection is unchanged and the
    /// result has at most two nonzero components.
    pub fn without_common_mode(&self) -> Self {
        let m = self.phi[0].min(self.phi[1]).min(self.phi[2]);
        if m <= T::zero() {
            return *self;
        }
        let mut out = *self;
        for p in out.phi.iter_mut() {
            *p = if *p == m { T::zero() } else { *p - m };
        }
        out
    }

    pub(crate) fn to_f64(self) -> [f64; 3] {
        [
            self.phi[0].as_f64(),
            self.phi[1].as_f64(),
            self.phi[2].as_f64(),
        ]
    }
}

/// Arm pitch degrees produced per degree of steering motor rotation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelCoefficient<T>(T);

impl<T: Scalar> ModelCoefficient<T> {
    pub fn new(k: T) -> Result<Self, KinematicsError> {
        if k.is_finite() && k > T::zero() {
            Ok(ModelCoefficient(k))
        } else {
            Err(KinematicsError::InvalidCoefficient(k.as_f64()))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        Self::new(self.0).map(|_| ())
    }
}

impl<T: Scalar> Default for ModelCoefficient<T> {
    fn default() -> Self {
        ModelCoefficient(T::lit(DEFAULT_K))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pose_normalizes_theta() {
        let p = PolarPose::new(1.0, 10.0, -30.0_f64);
        assert_eq!(p.theta, 330.0);
        assert!(p.validate().is_ok());
        assert!(PolarPose::new(-0.1, 10.0, 0.0_f64).validate().is_err());
        assert!(PolarPose::new(1.0, 90.5, 0.0_f64).validate().is_err());
    }

    #[test]
    fn coefficient_must_be_positive() {
        assert!(ModelCoefficient::new(0.0_f64).is_err());
        assert!(ModelCoefficient::new(f64::NAN).is_err());
        assert_eq!(ModelCoefficient::<f64>::default().value(), 0.104);
    }

    #[test]
    fn common_mode_removal() {
        let m = MotorAngles::new(30.0, 10.0, 50.0_f64).without_common_mode();
        assert_eq!(m.phi, [20.0, 0.0, 40.0]);
        assert!(m.is_valid());
        let m = MotorAngles::new(7.0, 7.0, 7.0_f64).without_common_mode();
        assert_eq!(m.phi, [0.0; 3]);
        let two = MotorAngles::new(3.0, 0.0, 4.0_f64);
        assert_eq!(two.without_common_mode(), two);
    }
}
