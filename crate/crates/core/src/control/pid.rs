use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Discrete PID gains, applied once per control tick: the integral term is
/// the running sum of errors and the derivative term the tick-to-tick
/// change in error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains<T> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
    /// Bound on the magnitude of the error sum.
    pub integral_limit: T,
    /// Bound on the magnitude of the PID output.
    pub output_limit: T,
}

impl<T: Scalar> PidGains<T> {
    /// Motor-degree gains for the three steering motors.
    pub fn steering_default() -> Self {
        PidGains {
            kp: T::lit(0.8),
            ki: T::lit(0.2),
            kd: T::lit(0.05),
            integral_limit: T::lit(1000.0),
            output_limit: T::lit(1000.0),
        }
    }

    /// Meter gains for the center (length) motor, whose command is the
    /// measured length plus the PID output.
    pub fn length_default() -> Self {
        PidGains {
            kp: T::lit(0.8),
            ki: T::lit(0.02),
            kd: T::zero(),
            integral_limit: T::lit(0.5),
            output_limit: T::lit(0.5),
        }
    }

    pub fn is_valid(&self) -> bool {
        let nonneg = |v: T| v.is_finite() && v >= T::zero();
        let pos = |v: T| v.is_finite() && v > T::zero();
        nonneg(self.kp)
            && nonneg(self.ki)
            && nonneg(self.kd)
            && pos(self.integral_limit)
            && pos(self.output_limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pid<T> {
    integral: T,
    prev_error: Option<T>,
}

impl<T: Scalar> Pid<T> {
    pub fn new() -> Self {
        Pid {
            integral: T::zero(),
            prev_error: None,
        }
    }

    pub fn reset(&mut self) {
        *self = Self::new();
    }

    pub fn integral(&self) -> T {
        self.integral
    }

    /// Output uses the error sum from previous ticks, so the first tick
    /// after a reset is purely proportional.
    pub fn update(&mut self, error: T, gains: &PidGains<T>) -> T {
        let derivative = self.prev_error.map_or(T::zero(), |p| error - p);
        let raw = gains.kp * error + gains.ki * self.integral + gains.kd * derivative;
        let lim = gains.integral_limit;
        self.integral = (self.integral + error).max(-lim).min(lim);
        self.prev_error = Some(error);
        raw.max(-gains.output_limit).min(gains.output_limit)
    }
}
