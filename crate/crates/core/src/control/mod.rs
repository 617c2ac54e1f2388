//! Decoupled length and steering controllers, with optional feedforward
//! from the inverse steering model.
//!
//! Steering errors are formed in motor space: both desired and measured
//! poses go through [`inverse_model`], and each engaged motor gets its own
//! PID on the difference.

mod closed_loop;
mod metrics;
mod pid;

pub use closed_loop::{
    row_for, run_closed_loop, tick_count, RunFlags, RunLog, RunMetadata, RunRow,
};
pub use metrics::{
    initial_theta_excursion, settling_metrics, AxisErrors, MetricsError, Settling, SettlingMetrics,
    DEFAULT_BAND,
};
pub use pid::{Pid, PidGains};

use serde::{Deserialize, Serialize};

use crate::kinematics::{
    cartesian_to_polar, in_workspace, inverse_model, sector_of, CartesianPoint, KinematicsError,
    ModelCoefficient, MotorAngles, PolarPose, MAX_MODEL_PITCH_DEG,
};
use crate::plant::MotorCommand;
use crate::scalar::{wrap_deg, Scalar};

/// Gains for both controllers. The same gains are used whether or not
/// feedforward is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlGains<T> {
    pub length: PidGains<T>,
    pub steering: PidGains<T>,
}

impl<T: Scalar> Default for ControlGains<T> {
    fn default() -> Self {
        ControlGains {
            length: PidGains::length_default(),
            steering: PidGains::steering_default(),
        }
    }
}

/// Pose error; `e_theta` is wrapped into `(-180, 180]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlError<T> {
    pub e_r: T,
    pub e_alpha: T,
    pub e_theta: T,
}

impl<T: Scalar> ControlError<T> {
    pub fn between(desired: &PolarPose<T>, measured: &PolarPose<T>) -> Self {
        ControlError {
            e_r: desired.r - measured.r,
            e_alpha: desired.alpha - measured.alpha,
            e_theta: wrap_deg(desired.theta - measured.theta),
        }
    }
}

/// A desired pose together with whether it lies in the nominal workspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target<T> {
    pub pose: PolarPose<T>,
    pub in_workspace: bool,
}

/// Everything one control tick produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput<T> {
    pub command: MotorCommand<T>,
    /// PID contribution per steering motor, before feedforward and clamping.
    pub feedback: MotorAngles<T>,
    /// Model feedforward per steering motor (zero when disabled).
    pub feedforward: MotorAngles<T>,
    pub error: ControlError<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState<T> {
    pub gains: ControlGains<T>,
    pub feedforward_enabled: bool,
    desired: PolarPose<T>,
    target_in_workspace: bool,
    length_pid: Pid<T>,
    steering_pids: [Pid<T>; 3],
}

impl<T: Scalar> ControllerState<T> {
    /// Controller holding a straight arm at zero length until a target is set.
    pub fn new(gains: ControlGains<T>, feedforward_enabled: bool) -> Self {
        ControllerState {
            gains,
            feedforward_enabled,
            desired: PolarPose::default(),
            target_in_workspace: false,
            length_pid: Pid::new(),
            steering_pids: [Pid::new(); 3],
        }
    }

    pub fn desired(&self) -> PolarPose<T> {
        self.desired
    }

    pub fn target_in_workspace(&self) -> bool {
        self.target_in_workspace
    }

    pub fn integrators(&self) -> [T; 4] {
        [
            self.length_pid.integral(),
            self.steering_pids[0].integral(),
            self.steering_pids[1].integral(),
            self.steering_pids[2].integral(),
        ]
    }

    /// Sets the target from a Cartesian point. Points outside the nominal
    /// workspace are accepted but flagged.
    pub fn set_target(
        &mut self,
        desired: &CartesianPoint<T>,
    ) -> Result<Target<T>, KinematicsError> {
        let pose = cartesian_to_polar(desired)?;
        self.set_target_pose(pose)
    }

    pub fn set_target_pose(&mut self, pose: PolarPose<T>) -> Result<Target<T>, KinematicsError> {
        let pose = PolarPose::new(pose.r, pose.alpha, pose.theta);
        pose.validate()?;
        self.desired = pose;
        self.target_in_workspace = in_workspace(&pose);
        Ok(Target {
            pose,
            in_workspace: self.target_in_workspace,
        })
    }

    /// One control tick against a measured pose. A measured pitch of zero
    /// means rotation is undefined and the measured motor equivalent is
    /// taken as all-slack.
    pub fn compute_command(
        &mut self,
        measured: &PolarPose<T>,
        k: ModelCoefficient<T>,
    ) -> ControlOutput<T> {
        let desired = self.desired;
        let error = ControlError::between(&desired, measured);

        let mu_r = measured.r + self.length_pid.update(error.e_r, &self.gains.length);

        let target = inverse_model(desired.alpha, desired.theta, k)
            .expect("desired pose validated on set_target");
        let measured_equiv = if measured.alpha > T::zero() {
            let a = measured.alpha.min(T::lit(MAX_MODEL_PITCH_DEG));
            inverse_model(a, measured.theta, k).unwrap_or_else(|_| MotorAngles::zero())
        } else {
            MotorAngles::zero()
        };

        let sector = sector_of(desired.theta);
        let idle = sector.idle();
        let mut feedback = MotorAngles::zero();
        let mut feedforward = MotorAngles::zero();
        let mut mu_phi = MotorAngles::zero();
        for motor in sector.engaged() {
            let e = target.get(motor) - measured_equiv.get(motor);
            let u = self.steering_pids[motor.index()].update(e, &self.gains.steering);
            feedback.set(motor, u);
            let ff = if self.feedforward_enabled {
                target.get(motor)
            } else {
                T::zero()
            };
            feedforward.set(motor, ff);
            mu_phi.set(motor, (u + ff).max(T::zero()));
        }
        self.steering_pids[idle.index()].reset();

        ControlOutput {
            command: MotorCommand { mu_r, mu_phi },
            feedback,
            feedforward,
            error,
        }
    }
}
