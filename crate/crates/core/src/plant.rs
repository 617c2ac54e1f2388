//! Simulated arm: rate-limited steering motors, pressure-dependent
//! eversion speed, a buckling payload line and a constant gravity sag.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{
    forward_model, inverse_model, sector_of, ModelCoefficient, MotorAngles, PolarPose,
    SteeringAngles, MAX_MODEL_PITCH_DEG,
};
use crate::scalar::{normalize_deg, Scalar};

/// Fully everted arm length, meters.
pub const MAX_LENGTH: f64 = 1.2;
/// Pressure at which `extension_speed_ref` was measured, psi.
pub const REFERENCE_PRESSURE: f64 = 8.0;
/// Upper end of the operating pressure range, psi.
pub const MAX_PRESSURE: f64 = 10.0;
/// Largest step accepted by [`step`], seconds.
pub const MAX_DT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlantError {
    #[error("plant.{field} = {value} is invalid: {reason}")]
    InvalidConfig {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantConfig<T> {
    /// Internal pressure, psi.
    pub pressure: T,
    /// Growth speed at the reference pressure, m/s.
    pub extension_speed_ref: T,
    /// Retraction speed, m/s.
    pub retraction_speed_ref: T,
    /// Steering motor shaft slew limit, deg/s.
    pub steering_motor_rate: T,
    /// Coefficient the simulated arm actually obeys.
    pub k_true: ModelCoefficient<T>,
    /// Slope of the buckling payload line, kg/psi.
    pub payload_per_psi: T,
    /// Magnitude of the gravity deflection, degrees of pitch.
    pub gravity_sag_mag: T,
    /// Rotation angle the sag points toward, degrees.
    pub gravity_sag_dir: T,
}

impl<T: Scalar> Default for PlantConfig<T> {
    fn default() -> Self {
        PlantConfig {
            pressure: T::lit(8.0),
            extension_speed_ref: T::lit(0.27),
            retraction_speed_ref: T::lit(0.25),
            steering_motor_rate: T::lit(90.0),
            k_true: ModelCoefficient::default(),
            payload_per_psi: T::lit(0.14),
            gravity_sag_mag: T::lit(6.0),
            gravity_sag_dir: T::lit(270.0),
        }
    }
}

impl<T: Scalar> PlantConfig<T> {
    pub fn without_sag(mut self) -> Self {
        self.gravity_sag_mag = T::zero();
        self
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        let bad = |field, value: T, reason| {
            Err(PlantError::InvalidConfig {
                field,
                value: value.as_f64(),
                reason,
            })
        };
        if !(self.pressure > T::zero() && self.pressure <= T::lit(MAX_PRESSURE)) {
            return bad("pressure", self.pressure, "must lie in (0, 10] psi");
        }
        for (field, v) in [
            ("extension_speed_ref", self.extension_speed_ref),
            ("retraction_speed_ref", self.retraction_speed_ref),
            ("steering_motor_rate", self.steering_motor_rate),
            ("payload_per_psi", self.payload_per_psi),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return bad(field, v, "must be positive and finite");
            }
        }
        if self.k_true.validate().is_err() {
            return bad("k_true", self.k_true.value(), "must be positive and finite");
        }
        if !(self.gravity_sag_mag.is_finite() && self.gravity_sag_mag >= T::zero()) {
            return bad(
                "gravity_sag_mag",
                self.gravity_sag_mag,
                "must be non-negative",
            );
        }
        if !self.gravity_sag_dir.is_finite() {
            return bad("gravity_sag_dir", self.gravity_sag_dir, "must be finite");
        }
        Ok(())
    }
}

/// Growth speed, linear in pressure through the origin.
pub fn extension_speed<T: Scalar>(config: &PlantConfig<T>) -> T {
    config.extension_speed_ref * (config.pressure / T::lit(REFERENCE_PRESSURE))
}

pub fn retraction_speed<T: Scalar>(config: &PlantConfig<T>) -> T {
    config.retraction_speed_ref
}

/// Largest tip payload before buckling, kg.
pub fn max_payload<T: Scalar>(config: &PlantConfig<T>) -> T {
    decimal_product(config.payload_per_psi, config.pressure)
}

/// `a * b`, computed on scaled integers when both factors are decimals with
/// at most six fractional digits, so that e.g. `0.14 * 10` yields the
/// nearest float to `1.4` rather than `1.4000000000000001`.
fn decimal_product<T: Scalar>(a: T, b: T) -> T {
    let scale = T::lit(1e6);
    let ia = (a * scale).round();
    let ib = (b * scale).round();
    let is_decimal =
        |x: T, ix: T| ((x * scale) - ix).abs() <= T::lit(1e-6) * ix.abs().max(T::one());
    let exact_limit = T::one() / T::epsilon();
    if is_decimal(a, ia) && is_decimal(b, ib) && (ia * ib).abs() < exact_limit {
        ia * ib / (scale * scale)
    } else {
        a * b
    }
}

/// Adds the sag vector to the deflection vector `(alpha at theta)` and
/// returns the magnitude and direction of the sum.
pub fn apply_sag<T: Scalar>(pose: SteeringAngles<T>, config: &PlantConfig<T>) -> SteeringAngles<T> {
    if config.gravity_sag_mag == T::zero() {
        return pose;
    }
    let (ts, tc) = pose.theta.to_radians().sin_cos();
    let (ss, sc) = config.gravity_sag_dir.to_radians().sin_cos();
    let y = pose.alpha * tc + config.gravity_sag_mag * sc;
    let z = pose.alpha * ts + config.gravity_sag_mag * ss;
    let alpha = y.hypot(z);
    if alpha == T::zero() {
        return SteeringAngles::straight();
    }
    SteeringAngles::new(alpha, z.atan2(y).to_degrees())
}

/// Non-negative steering command whose steady state is measured as
/// `target` (alpha, theta), using only the two motors of the target's
/// sector. `None` when gravity pushes the pose outside what that pair can
/// pull toward.
pub fn sag_compensating_command<T: Scalar>(
    alpha: T,
    theta: T,
    config: &PlantConfig<T>,
) -> Option<MotorAngles<T>> {
    let sector = sector_of(theta);
    let (ts, tc) = theta.to_radians().sin_cos();
    let (ss, sc) = config.gravity_sag_dir.to_radians().sin_cos();
    let y = alpha * tc - config.gravity_sag_mag * sc;
    let z = alpha * ts - config.gravity_sag_mag * ss;
    let needed = y.hypot(z);
    if needed == T::zero() {
        return Some(MotorAngles::zero());
    }
    if needed > T::lit(MAX_MODEL_PITCH_DEG) {
        return None;
    }
    let direction = normalize_deg(z.atan2(y).to_degrees());
    let offset = normalize_deg(direction - T::lit(sector.start_deg()));
    let tol = T::lit(1e-9);
    let offset = if offset > T::lit(360.0) - tol {
        T::zero()
    } else {
        offset
    };
    if offset > T::lit(120.0) + tol {
        return None;
    }
    inverse_model(needed, direction, config.k_true).ok()
}

/// Position command for the center (length) motor and the three steering motors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorCommand<T> {
    /// Target arm length, meters.
    pub mu_r: T,
    /// Target steering motor angles, degrees.
    pub mu_phi: MotorAngles<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState<T> {
    pub length: T,
    /// Actual shaft positions.
    pub motor_angles: MotorAngles<T>,
    pub time: T,
    /// Pose as a motion-capture system would report it, sag included.
    pub measured_pose: PolarPose<T>,
    pub theta_defined: bool,
    /// Tip payload, kg.
    pub payload: T,
    /// The last command was out of range and got clamped.
    pub clamped: bool,
    pub buckled: bool,
}

impl<T: Scalar> PlantState<T> {
    pub fn new(
        config: &PlantConfig<T>,
        length: T,
        motor_angles: MotorAngles<T>,
        payload: T,
    ) -> Self {
        let length = length.max(T::zero()).min(T::lit(MAX_LENGTH));
        let motor_angles = MotorAngles {
            phi: motor_angles.phi.map(|p| p.max(T::zero())),
        };
        let mut state = PlantState {
            length,
            motor_angles,
            time: T::zero(),
            measured_pose: PolarPose::default(),
            theta_defined: false,
            payload,
            clamped: false,
            buckled: false,
        };
        state.buckled = check_buckling(&state, config);
        state.remeasure(config);
        state
    }

    /// Slack cables at the given length, no payload.
    pub fn at_rest(config: &PlantConfig<T>, length: T) -> Self {
        Self::new(config, length, MotorAngles::zero(), T::zero())
    }

    /// Deflection the steering model predicts for the current shafts, before sag.
    pub fn model_angles(&self, config: &PlantConfig<T>) -> SteeringAngles<T> {
        forward_model(&self.motor_angles.without_common_mode(), config.k_true)
            .expect("non-negative shaft angles with common mode removed")
    }

    fn remeasure(&mut self, config: &PlantConfig<T>) {
        let seen = apply_sag(self.model_angles(config), config);
        self.measured_pose = PolarPose::new(self.length, seen.alpha, seen.theta);
        self.theta_defined = seen.theta_defined;
    }
}

/// Payload beyond the buckling line.
pub fn check_buckling<T: Scalar>(state: &PlantState<T>, config: &PlantConfig<T>) -> bool {
    state.payload > max_payload(config)
}

fn approach<T: Scalar>(from: T, to: T, up: T, down: T) -> T {
    if to > from {
        if to - from <= up {
            to
        } else {
            from + up
        }
    } else if from - to <= down {
        to
    } else {
        from - down
    }
}

/// Advances the plant by `dt` under `cmd`. Out-of-range commands are
/// clamped and flagged, never rejected.
///
/// # Panics
///
/// If `dt` is not in `(0, 0.1]`.
pub fn step<T: Scalar>(
    state: &PlantState<T>,
    cmd: &MotorCommand<T>,
    dt: T,
    config: &PlantConfig<T>,
) -> PlantState<T> {
    assert!(
        dt > T::zero() && dt <= T::lit(MAX_DT),
        "plant step dt must be in (0, {MAX_DT}], got {dt}"
    );
    let mut next = *state;
    next.clamped = false;

    let max_len = T::lit(MAX_LENGTH);
    let mut target_len = cmd.mu_r;
    if !target_len.is_finite() {
        target_len = state.length;
        next.clamped = true;
    } else if target_len < T::zero() || target_len > max_len {
        target_len = target_len.max(T::zero()).min(max_len);
        next.clamped = true;
    }

    next.buckled = check_buckling(state, config);
    if next.buckled && target_len > state.length {
        target_len = state.length;
    }
    next.length = approach(
        state.length,
        target_len,
        extension_speed(config) * dt,
        retraction_speed(config) * dt,
    );

    let slew = config.steering_motor_rate * dt;
    for (i, cur) in next.motor_angles.phi.iter_mut().enumerate() {
        let mut want = cmd.mu_phi.phi[i];
        if !want.is_finite() {
            want = state.motor_angles.phi[i];
            next.clamped = true;
        } else if want < T::zero() {
            want = T::zero();
            next.clamped = true;
        }
        *cur = approach(state.motor_angles.phi[i], want, slew, slew);
    }

    next.time = state.time + dt;
    next.remeasure(config);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> PlantConfig<f64> {
        PlantConfig::default()
    }

    #[test]
    fn speed_anchor_and_linearity() {
        assert_eq!(extension_speed(&cfg()), 0.27);
        let half = PlantConfig {
            pressure: 4.0,
            ..cfg()
        };
        assert_relative_eq!(extension_speed(&half), 0.135, epsilon = 1e-15);
        let tiny = PlantConfig {
            pressure: 1e-9,
            ..cfg()
        };
        assert!(extension_speed(&tiny) < 1e-9);
    }

    #[test]
    fn payload_line() {
        let c = PlantConfig {
            pressure: 10.0,
            ..cfg()
        };
        assert_eq!(max_payload(&c), 1.4);
        let c5 = PlantConfig {
            pressure: 5.0,
            ..cfg()
        };
        assert_relative_eq!(max_payload(&c5), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn buckling_boundary_inclusive() {
        let c = PlantConfig {
            pressure: 10.0,
            ..cfg()
        };
        let mut s = PlantState::at_rest(&c, 0.5);
        s.payload = max_payload(&c);
        assert!(!check_buckling(&s, &c));
        s.payload = 1.5;
        assert!(check_buckling(&s, &c));
        s.payload = 0.0;
        assert!(!check_buckling(&s, &c));
    }

    #[test]
    fn buckled_arm_does_not_grow() {
        let c = PlantConfig {
            pressure: 5.0,
            ..cfg()
        };
        let s = PlantState::new(&c, 0.5, MotorAngles::zero(), 1.0);
        let cmd = MotorCommand {
            mu_r: 1.2,
            mu_phi: MotorAngles::zero(),
        };
        let n = step(&s, &cmd, 0.05, &c);
        assert!(n.buckled);
        assert_eq!(n.length, 0.5);
        let back = step(&s, &MotorCommand { mu_r: 0.0, ..cmd }, 0.05, &c);
        assert!(back.length < 0.5);
    }

    #[test]
    fn one_second_growth() {
        let s = PlantState::at_rest(&cfg(), 0.0);
        let cmd = MotorCommand {
            mu_r: 1.2,
            mu_phi: MotorAngles::zero(),
        };
        let n = step(&s, &cmd, 0.1, &cfg());
        assert_relative_eq!(n.length, 0.027, epsilon = 1e-15);
        assert_relative_eq!(n.time, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn holds_at_setpoint() {
        let s = PlantState::at_rest(&cfg(), 0.5);
        let cmd = MotorCommand {
            mu_r: 0.5,
            mu_phi: MotorAngles::zero(),
        };
        assert_eq!(step(&s, &cmd, 0.01, &cfg()).length, 0.5);
    }

    #[test]
    fn converged_motors_match_model() {
        let c = cfg().without_sag();
        let mut s = PlantState::at_rest(&c, 1.0);
        let cmd = MotorCommand {
            mu_r: 1.0,
            mu_phi: MotorAngles::new(100.0, 0.0, 0.0),
        };
        for _ in 0..200 {
            s = step(&s, &cmd, 0.01, &c);
        }
        assert_eq!(s.motor_angles.phi, [100.0, 0.0, 0.0]);
        assert_relative_eq!(s.measured_pose.alpha, 10.4, epsilon = 1e-12);
        assert_eq!(s.measured_pose.theta, 0.0);
    }

    #[test]
    fn clamps_and_flags() {
        let s = PlantState::at_rest(&cfg(), 0.5);
        let cmd = MotorCommand {
            mu_r: 3.0,
            mu_phi: MotorAngles::new(-5.0, 0.0, 0.0),
        };
        let n = step(&s, &cmd, 0.01, &cfg());
        assert!(n.clamped);
        assert_eq!(n.motor_angles.phi[0], 0.0);
    }

    #[test]
    #[should_panic]
    fn rejects_large_dt() {
        let s = PlantState::at_rest(&cfg(), 0.5);
        step(&s, &MotorCommand::default(), 0.5, &cfg());
    }

    #[test]
    fn sag_examples() {
        let c = cfg();
        let p = SteeringAngles::new(30.0, 0.0);
        assert_eq!(apply_sag(p, &c.without_sag()), p);

        let cancel = apply_sag(SteeringAngles::new(6.0, 90.0), &c);
        assert!(cancel.alpha < 1e-12);

        let out = apply_sag(p, &c);
        assert_relative_eq!(out.alpha, 936.0_f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(
            out.theta,
            360.0 - (0.2_f64).atan().to_degrees(),
            epsilon = 1e-10
        );
        assert!((out.alpha - 30.594).abs() < 1e-3);
        assert!((out.theta - 348.69).abs() < 1e-2);
    }

    #[test]
    fn rest_pose_hangs_along_sag() {
        let s = PlantState::at_rest(&cfg(), 1.0);
        assert_relative_eq!(s.measured_pose.alpha, 6.0, epsilon = 1e-12);
        assert_relative_eq!(s.measured_pose.theta, 270.0, epsilon = 1e-12);
        let flat = PlantState::at_rest(&cfg().without_sag(), 1.0);
        assert!(!flat.theta_defined);
    }

    #[test]
    fn compensating_command_reaches_target() {
        let c = cfg();
        let cmd = sag_compensating_command(30.0, 45.0, &c).unwrap();
        let s = PlantState::new(&c, 1.0, cmd, 0.0);
        assert_relative_eq!(s.measured_pose.alpha, 30.0, epsilon = 1e-9);
        assert_relative_eq!(s.measured_pose.theta, 45.0, epsilon = 1e-9);
        // the top of S3 cannot be lifted against gravity
        assert!(sag_compensating_command(10.4, 350.0, &c).is_none());
        assert!(sag_compensating_command(10.4, 350.0, &c.without_sag()).is_some());
    }
}
