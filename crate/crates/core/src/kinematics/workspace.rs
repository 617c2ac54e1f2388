use serde::{Deserialize, Serialize};

use super::PolarPose;
use crate::scalar::Scalar;

/// Reachable spherical sector: a shell between two radii inside a cone
/// around the straight-arm axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceLimits {
    pub r_min: f64,
    pub r_max: f64,
    /// Half-angle of the cone, degrees.
    pub alpha_max: f64,
}

impl Default for WorkspaceLimits {
    fn default() -> Self {
        WorkspaceLimits {
            r_min: 0.3,
            r_max: 1.2,
            alpha_max: 60.0,
        }
    }
}

impl WorkspaceLimits {
    pub fn contains<T: Scalar>(&self, pose: &PolarPose<T>) -> bool {
        let r = pose.r.as_f64();
        let a = pose.alpha.as_f64();
        r >= self.r_min && r <= self.r_max && a >= 0.0 && a <= self.alpha_max
    }
}

/// `0.3 <= R <= 1.2` and `alpha <= 60`.
pub fn in_workspace<T: Scalar>(pose: &PolarPose<T>) -> bool {
    WorkspaceLimits::default().contains(pose)
}
