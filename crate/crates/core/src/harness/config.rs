//! JSON configuration. Every field is optional; unknown keys are rejected
//! with their path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::control::{ControlGains, PidGains, DEFAULT_BAND};
use crate::kinematics::{ModelCoefficient, PolarPose, DEFAULT_K};
use crate::plant::{PlantConfig, MAX_DT};

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "EVERKIN_CONFIG";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub plant: PlantConfig<f64>,
    #[serde(deserialize_with = "gains_with_defaults")]
    pub gains: ControlGains<f64>,
    #[serde(rename = "loop")]
    pub loop_settings: LoopConfig,
    pub experiment: ExperimentParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoopConfig {
    /// Control period, seconds. Defaults to the 120 Hz mocap rate.
    pub dt: f64,
    /// Closed-loop run length, seconds.
    pub duration: f64,
    pub feedforward: bool,
    /// Coefficient the controller's model assumes.
    pub model_k: f64,
    pub settle_band: f64,
    /// Arm length at the start of a closed-loop run, meters.
    pub initial_length: f64,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            dt: 1.0 / 120.0,
            duration: 30.0,
            feedforward: true,
            model_k: DEFAULT_K,
            settle_band: DEFAULT_BAND,
            initial_length: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    pub r: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl PoseSpec {
    pub fn pose(&self) -> PolarPose<f64> {
        PolarPose::new(self.r, self.alpha, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentParams {
    /// Step target for `step-compare` and `sim`.
    pub target: PoseSpec,
    /// Noise seed; `--seed` overrides it.
    pub seed: u64,

    /// Pitch levels of the circular sweep, degrees.
    pub alpha_levels: Vec<f64>,
    /// Time for one full circle, seconds.
    pub sweep_period: f64,
    pub sweep_length: f64,

    pub pressures: Vec<f64>,
    pub lengths: Vec<f64>,
    /// Total single-cable samples across all conditions.
    pub samples: usize,
    /// Standard deviation of the pitch measurement noise, degrees.
    pub noise_sigma: f64,
    /// Pulled motor for the single-cable logs, 1 to 3.
    pub motor: usize,
    pub max_motor_angle: f64,
    /// Keep the plant's gravity sag while collecting single-cable logs.
    pub calibration_sag: bool,
    pub independence_threshold: f64,

    pub r_step: f64,
    pub r_max: f64,
    pub alpha_step: f64,
    pub alpha_max: f64,
    pub theta_step: f64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            target: PoseSpec {
                r: 1.0,
                alpha: 30.0,
                theta: 45.0,
            },
            seed: 42,
            alpha_levels: vec![5.2, 10.4, 15.6],
            sweep_period: 36.0,
            sweep_length: 1.0,
            pressures: vec![3.0, 6.0, 9.0],
            lengths: vec![0.6, 1.2],
            samples: 200,
            noise_sigma: 0.2,
            motor: 1,
            max_motor_angle: 300.0,
            calibration_sag: false,
            independence_threshold: 0.01,
            r_step: 0.1,
            r_max: 1.3,
            alpha_step: 5.0,
            alpha_max: 70.0,
            theta_step: 5.0,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PidPatch {
    kp: Option<f64>,
    ki: Option<f64>,
    kd: Option<f64>,
    integral_limit: Option<f64>,
    output_limit: Option<f64>,
}

impl PidPatch {
    fn over(self, base: PidGains<f64>) -> PidGains<f64> {
        PidGains {
            kp: self.kp.unwrap_or(base.kp),
            ki: self.ki.unwrap_or(base.ki),
            kd: self.kd.unwrap_or(base.kd),
            integral_limit: self.integral_limit.unwrap_or(base.integral_limit),
            output_limit: self.output_limit.unwrap_or(base.output_limit),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GainsPatch {
    length: PidPatch,
    steering: PidPatch,
}

fn gains_with_defaults<'de, D>(de: D) -> Result<ControlGains<f64>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let patch = GainsPatch::deserialize(de)?;
    let base = ControlGains::default();
    Ok(ControlGains {
        length: patch.length.over(base.length),
        steering: patch.steering.over(base.steering),
    })
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            HarnessError::Validation(format!("config: at `{}`: {}", e.path(), e.inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Compact JSON of the effective configuration, as embedded in logs.
    pub fn snapshot(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn model_k(&self) -> ModelCoefficient<f64> {
        ModelCoefficient::new(self.loop_settings.model_k).expect("validated")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |m: String| Err(HarnessError::Validation(m));
        self.plant
            .validate()
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
        for (name, g) in [
            ("length", &self.gains.length),
            ("steering", &self.gains.steering),
        ] {
            if !g.is_valid() {
                return invalid(format!("gains.{name}: gains must be >= 0 and limits > 0"));
            }
        }
        let l = &self.loop_settings;
        if !(l.dt > 0.0 && l.dt <= MAX_DT) {
            return invalid(format!("loop.dt = {} must lie in (0, {MAX_DT}]", l.dt));
        }
        if !(l.duration.is_finite() && l.duration >= l.dt) {
            return invalid(format!(
                "loop.duration = {} must be at least loop.dt",
                l.duration
            ));
        }
        if ModelCoefficient::new(l.model_k).is_err() {
            return invalid(format!("loop.model_k = {} must be positive", l.model_k));
        }
        if !(l.settle_band > 0.0 && l.settle_band < 1.0) {
            return invalid(format!(
                "loop.settle_band = {} must lie in (0, 1)",
                l.settle_band
            ));
        }
        if !(0.0..=crate::plant::MAX_LENGTH).contains(&l.initial_length) {
            return invalid(format!(
                "loop.initial_length = {} outside [0, 1.2]",
                l.initial_length
            ));
        }
        let e = &self.experiment;
        if e.target.pose().validate().is_err() {
            return invalid("experiment.target: need r >= 0 and 0 <= alpha <= 90".into());
        }
        if e.alpha_levels.is_empty() || e.alpha_levels.iter().any(|a| !(*a > 0.0 && *a <= 90.0)) {
            return invalid("experiment.alpha_levels: need at least one level in (0, 90]".into());
        }
        if !(e.sweep_period > 0.0 && e.sweep_period.is_finite()) {
            return invalid("experiment.sweep_period must be positive".into());
        }
        if !(0.0..=crate::plant::MAX_LENGTH).contains(&e.sweep_length) {
            return invalid("experiment.sweep_length outside [0, 1.2]".into());
        }
        if e.pressures.is_empty() || e.lengths.is_empty() {
            return invalid("experiment.pressures and experiment.lengths must be non-empty".into());
        }
        for p in &e.pressures {
            let probe = PlantConfig {
                pressure: *p,
                ..self.plant
            };
            if probe.validate().is_err() {
                return invalid(format!("experiment.pressures: {p} outside (0, 10]"));
            }
        }
        if e.lengths
            .iter()
            .any(|l| !(*l > 0.0 && *l <= crate::plant::MAX_LENGTH))
        {
            return invalid("experiment.lengths must lie in (0, 1.2]".into());
        }
        if e.samples < 2 * e.pressures.len() * e.lengths.len() {
            return invalid(
                "experiment.samples must give every condition at least two samples".into(),
            );
        }
        if !(e.noise_sigma >= 0.0 && e.noise_sigma.is_finite()) {
            return invalid("experiment.noise_sigma must be non-negative".into());
        }
        if !(1..=3).contains(&e.motor) {
            return invalid(format!("experiment.motor = {} must be 1, 2 or 3", e.motor));
        }
        if !(e.max_motor_angle > 0.0 && e.max_motor_angle.is_finite()) {
            return invalid("experiment.max_motor_angle must be positive".into());
        }
        for (name, v) in [
            ("r_step", e.r_step),
            ("r_max", e.r_max),
            ("alpha_step", e.alpha_step),
            ("alpha_max", e.alpha_max),
            ("theta_step", e.theta_step),
            ("independence_threshold", e.independence_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("experiment.{name} must be positive"));
            }
        }
        if e.alpha_max > 90.0 {
            return invalid("experiment.alpha_max must not exceed 90".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = Config::from_json("{}").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.plant.steering_motor_rate, 90.0);
        assert_eq!(c.gains.steering.kp, 0.8);
        assert!((c.loop_settings.dt - 1.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn partial_sections_merge() {
        let c =
            Config::from_json(r#"{"gains":{"steering":{"ki":0.5}},"plant":{"gravity_sag_mag":0}}"#)
                .unwrap();
        assert_eq!(c.gains.steering.ki, 0.5);
        assert_eq!(c.gains.steering.kp, 0.8);
        assert_eq!(c.gains.length, PidGains::length_default());
        assert_eq!(c.plant.gravity_sag_mag, 0.0);
        assert_eq!(c.plant.pressure, 8.0);
    }

    #[test]
    fn unknown_key_reports_path() {
        let err = Config::from_json(r#"{"plant":{"presure":8}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("plant.presure"), "{msg}");
        let err = Config::from_json(r#"{"gains":{"steering":{"kq":1}}}"#).unwrap_err();
        assert!(err.to_string().contains("gains.steering.kq"), "{err}");
    }

    #[test]
    fn out_of_range_values_rejected() {
        assert!(Config::from_json(r#"{"plant":{"pressure":12}}"#).is_err());
        assert!(Config::from_json(r#"{"loop":{"dt":0.5}}"#).is_err());
        assert!(Config::from_json(r#"{"experiment":{"motor":4}}"#).is_err());
        assert!(Config::from_json(r#"{"gains":{"length":{"kp":-1}}}"#).is_err());
    }

    #[test]
    fn snapshot_round_trips() {
        let mut c = Config::default();
        c.plant.gravity_sag_mag = 3.5;
        c.experiment.seed = 7;
        let back = Config::from_json(&c.snapshot()).unwrap();
        assert_eq!(back, c);
    }
}
