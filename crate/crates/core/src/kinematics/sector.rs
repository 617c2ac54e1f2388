use serde::{Deserialize, Serialize};

use crate::scalar::{normalize_deg, Scalar};

/// One of the three steering motors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Motor {
    M1,
    M2,
    M3,
}

impl Motor {
    pub const ALL: [Motor; 3] = [Motor::M1, Motor::M2, Motor::M3];

    /// Zero-based slot in [`MotorAngles::phi`](super::MotorAngles).
    pub fn index(self) -> usize {
        match self {
            Motor::M1 => 0,
            Motor::M2 => 1,
            Motor::M3 => 2,
        }
    }

    /// Global bearing of the motor's cable, degrees.
    pub fn bearing(self) -> f64 {
        120.0 * self.index() as f64
    }
}

/// A 120° azimuthal sector steered by the two motors bounding it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SteeringSector {
    S1,
    S2,
    S3,
}

impl SteeringSector {
    pub const ALL: [SteeringSector; 3] =
        [SteeringSector::S1, SteeringSector::S2, SteeringSector::S3];

    /// Half-open `[start, end)` range in degrees.
    pub fn theta_range(self) -> (f64, f64) {
        let start = self.start_deg();
        (start, start + 120.0)
    }

    pub fn start_deg(self) -> f64 {
        match self {
            SteeringSector::S1 => 0.0,
            SteeringSector::S2 => 120.0,
            SteeringSector::S3 => 240.0,
        }
    }

    /// Engaged motors ordered as (lower-edge motor, upper-edge motor).
    pub fn engaged(self) -> [Motor; 2] {
        match self {
            SteeringSector::S1 => [Motor::M1, Motor::M2],
            SteeringSector::S2 => [Motor::M2, Motor::M3],
            SteeringSector::S3 => [Motor::M3, Motor::M1],
        }
    }

    pub fn idle(self) -> Motor {
        match self {
            SteeringSector::S1 => Motor::M3,
            SteeringSector::S2 => Motor::M1,
            SteeringSector::S3 => Motor::M2,
        }
    }

    /// True when `theta` (any real angle) falls inside this sector.
    pub fn contains<T: Scalar>(self, theta: T) -> bool {
        sector_of(theta) == self
    }
}

/// Sector whose half-open range contains `theta` after normalization.
pub fn sector_of<T: Scalar>(theta: T) -> SteeringSector {
    let t = normalize_deg(theta);
    if t < T::lit(120.0) {
        SteeringSector::S1
    } else if t < T::lit(240.0) {
        SteeringSector::S2
    } else {
        SteeringSector::S3
    }
}
